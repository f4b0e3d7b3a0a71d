//! Data-parallel kernels with a sequential fallback.
//!
//! The candidate scans behind the MCD searches and the brute-force oracle are
//! embarrassingly parallel: evaluate an independent predicate over a fixed
//! candidate list and merge deterministically. With the `parallel` feature
//! (default) they fan out over rayon; without it they run sequentially and
//! produce byte-identical results.
//!
//! Early-exit scans are chunked: each chunk is evaluated in full (possibly in
//! parallel) and then inspected in candidate order, so the outcome never
//! depends on thread scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk size for early-exit scans. Large enough to amortize fan-out,
/// small enough that an early hit skips most of the tail.
const SCAN_CHUNK: usize = 256;

#[cfg(feature = "parallel")]
fn eval_all<T, U, F>(items: &[T], eval: &F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    items.par_iter().map(eval).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_all<T, U, F>(items: &[T], eval: &F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(eval).collect()
}

/// Evaluates `eval` on every item, in input order.
pub fn map_collect<T, U, F>(items: &[T], eval: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    eval_all(items, &eval)
}

/// Returns the items for which `keep` holds, in input order.
pub fn filter_collect<T, F>(items: Vec<T>, keep: F) -> Vec<T>
where
    T: Send + Sync,
    F: Fn(&T) -> bool + Sync,
{
    let flags = eval_all(&items, &keep);
    items
        .into_iter()
        .zip(flags)
        .filter_map(|(t, ok)| ok.then_some(t))
        .collect()
}

/// First item (in input order) whose evaluation yields `Some`, scanning
/// chunk by chunk so later work is skipped once a hit is found.
///
/// `eval` may fail; the scan resolves to the first error *or* hit in
/// candidate order, whichever comes first, so budgeted searches behave
/// deterministically.
pub fn scan_first<T, U, E, F>(items: &[T], eval: F) -> Result<Option<(usize, U)>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<Option<U>, E> + Sync,
{
    let mut offset = 0;
    for chunk in items.chunks(SCAN_CHUNK) {
        for (i, r) in eval_all(chunk, &eval).into_iter().enumerate() {
            match r {
                Err(e) => return Err(e),
                Ok(Some(u)) => return Ok(Some((offset + i, u))),
                Ok(None) => {}
            }
        }
        offset += chunk.len();
    }
    Ok(None)
}

/// Benchmark entry points pinning the two kernel variants, so a single
/// `cargo bench` run (with the default features) can compare them.
#[doc(hidden)]
pub mod bench_support {
    /// Sequential predicate filter, regardless of the `parallel` feature.
    pub fn filter_collect_seq<T, F>(items: Vec<T>, keep: F) -> Vec<T>
    where
        F: Fn(&T) -> bool,
    {
        items.into_iter().filter(|t| keep(t)).collect()
    }

    /// Rayon predicate filter; only available with the `parallel` feature.
    #[cfg(feature = "parallel")]
    pub fn filter_collect_par<T, F>(items: Vec<T>, keep: F) -> Vec<T>
    where
        T: Send + Sync,
        F: Fn(&T) -> bool + Sync,
    {
        super::filter_collect(items, keep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_preserves_order() {
        let out = filter_collect((0..100).collect(), |n| n % 3 == 0);
        assert_eq!(out, (0..100).filter(|n| n % 3 == 0).collect::<Vec<_>>());
    }

    #[test]
    fn scan_first_stops_at_first_hit() {
        let items: Vec<i64> = (0..10_000).collect();
        let hit =
            scan_first(&items, |&n| Ok::<_, ()>((n == 777).then_some(n * 2))).unwrap();
        assert_eq!(hit, Some((777, 1554)));
    }

    #[test]
    fn scan_first_error_before_hit_wins() {
        let items: Vec<i64> = (0..10).collect();
        let res: Result<Option<(usize, i64)>, &str> = scan_first(&items, |&n| {
            if n == 3 {
                Err("boom")
            } else if n == 5 {
                Ok(Some(n))
            } else {
                Ok(None)
            }
        });
        assert_eq!(res, Err("boom"));
    }
}

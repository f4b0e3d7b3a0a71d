//! Brute-force ground truth over finitely generated truncations.
//!
//! Every structural algorithm in this crate is cross-checked against this
//! module. The oracle answers questions about the finitely generated monoid
//! `<g_1, ..., g_K>` only — never about an infinite family — by clearing
//! denominators and searching the resulting linear Diophantine problem with
//! a pruned depth-first search.
//!
//! Searches are exact or they fail loudly: a node cap bounds every search and
//! exceeding it is a first-class [`OracleError::Overflow`] outcome.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::budget::{Budget, Exhausted, DEFAULT_NODE_CAP};
use crate::exec;
use crate::rat::Rat;

/// A factorization over the generator list: generator index (1-based) to
/// multiplicity. Stored multiplicities are always >= 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Factorization {
    terms: BTreeMap<usize, u64>,
}

impl Factorization {
    pub fn new(terms: BTreeMap<usize, u64>) -> Self {
        let terms = terms.into_iter().filter(|&(_, m)| m > 0).collect();
        Factorization { terms }
    }

    pub fn empty() -> Self {
        Factorization { terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> &BTreeMap<usize, u64> {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total number of atom copies.
    pub fn length(&self) -> u64 {
        self.terms.values().sum()
    }

    /// Re-evaluates the factorization against its generator list.
    pub fn value(&self, gens: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (&idx, &mult) in &self.terms {
            acc += &(&gens[idx - 1] * mult);
        }
        acc
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, m)| format!("{m}*g{i}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Errors from oracle searches.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search budget exhausted after {nodes} nodes")]
    Overflow { nodes: u64 },
    #[error("{value} is not a member of the truncation")]
    NotAMember { value: Rat },
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("generator {position} is zero")]
    ZeroGenerator { position: usize },
    #[error("values exceed the oracle's integer range")]
    IntegerRange,
}

impl From<Exhausted> for OracleError {
    fn from(e: Exhausted) -> Self {
        OracleError::Overflow { nodes: e.cap }
    }
}

/// Exhaustive-search oracle for one truncation `<g_1, ..., g_K>`.
#[derive(Debug, Clone)]
pub struct Oracle {
    gens: Vec<Rat>,
    node_cap: u64,
}

/// Integer form of the problem: generators and targets scaled by a common
/// denominator. Weights are stored largest-first with suffix gcds for
/// pruning; `order[i]` maps the sorted position back to the 1-based
/// generator index.
struct Cleared {
    weights: Vec<u128>,
    suffix_gcd: Vec<u128>,
    order: Vec<usize>,
}

impl Oracle {
    pub fn new(gens: Vec<Rat>, node_cap: u64) -> Result<Self, OracleError> {
        if gens.is_empty() {
            return Err(OracleError::EmptyGenerators);
        }
        for (i, g) in gens.iter().enumerate() {
            if g.is_zero() {
                return Err(OracleError::ZeroGenerator { position: i + 1 });
            }
        }
        Ok(Oracle { gens, node_cap })
    }

    pub fn with_default_cap(gens: Vec<Rat>) -> Result<Self, OracleError> {
        Oracle::new(gens, DEFAULT_NODE_CAP)
    }

    pub fn generators(&self) -> &[Rat] {
        &self.gens
    }

    pub fn node_cap(&self) -> u64 {
        self.node_cap
    }

    fn clear_denominators(&self, q: &Rat) -> Result<Option<(Cleared, u128)>, OracleError> {
        // Scale by lcm of all generator denominators; if q's denominator
        // does not divide it, q has an unreachable valuation and is not a
        // member of the truncation.
        let mut scale = BigUint::from(1u32);
        for g in &self.gens {
            scale = scale.lcm(g.den());
        }
        if !(&scale % q.den()).is_zero() {
            return Ok(None);
        }
        let mut indexed: Vec<(usize, u128)> = Vec::with_capacity(self.gens.len());
        for (i, g) in self.gens.iter().enumerate() {
            let w = (g.num() * (&scale / g.den()))
                .to_u128()
                .ok_or(OracleError::IntegerRange)?;
            indexed.push((i + 1, w));
        }
        indexed.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let weights: Vec<u128> = indexed.iter().map(|&(_, w)| w).collect();
        let order: Vec<usize> = indexed.iter().map(|&(i, _)| i).collect();
        let mut suffix_gcd = vec![0u128; weights.len() + 1];
        for i in (0..weights.len()).rev() {
            suffix_gcd[i] = weights[i].gcd(&suffix_gcd[i + 1]);
        }
        let target = (q.num() * (&scale / q.den()))
            .to_u128()
            .ok_or(OracleError::IntegerRange)?;
        Ok(Some((Cleared { weights, suffix_gcd, order }, target)))
    }

    /// Every factorization of `q` over the generators; the empty set means
    /// `q` is not a member of the truncation.
    pub fn factorize_all(&self, q: &Rat) -> Result<Vec<Factorization>, OracleError> {
        let Some((cleared, target)) = self.clear_denominators(q)? else {
            return Ok(Vec::new());
        };
        let mut budget = Budget::new(self.node_cap);
        let mut out = Vec::new();
        let mut coeffs = vec![0u64; cleared.weights.len()];
        collect_solutions(&cleared, target, 0, &mut coeffs, &mut budget, &mut |coeffs| {
            let terms: BTreeMap<usize, u64> = coeffs
                .iter()
                .enumerate()
                .filter(|&(_, &m)| m > 0)
                .map(|(pos, &m)| (cleared.order[pos], m))
                .collect();
            out.push(Factorization::new(terms));
        })?;
        out.sort();
        Ok(out)
    }

    /// Membership in the truncation, with early exit on the first witness.
    pub fn is_member(&self, q: &Rat) -> Result<bool, OracleError> {
        let mut budget = Budget::new(self.node_cap);
        self.is_member_budgeted(q, &mut budget)
    }

    fn is_member_budgeted(&self, q: &Rat, budget: &mut Budget) -> Result<bool, OracleError> {
        let Some((cleared, target)) = self.clear_denominators(q)? else {
            return Ok(false);
        };
        Ok(find_one_solution(&cleared.weights, &cleared.suffix_gcd, target, 0, budget)?)
    }

    /// All element values of the truncation up to `bound`, ascending from 0.
    pub fn enumerate_values(&self, bound: &Rat) -> Result<Vec<Rat>, OracleError> {
        let mut budget = Budget::new(self.node_cap);
        let seen = self.value_table(bound, &mut budget)?;
        let mut out: Vec<Rat> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    fn value_table(&self, bound: &Rat, budget: &mut Budget) -> Result<HashSet<Rat>, Exhausted> {
        let mut seen: HashSet<Rat> = HashSet::new();
        let mut stack_value = Rat::zero();
        enumerate_rec(&self.gens, 0, &mut stack_value, bound, &mut seen, budget)?;
        Ok(seen)
    }

    /// All common divisors of a nonempty member set, ascending by value.
    ///
    /// Every `s` must itself be a member of the truncation.
    ///
    /// When the full value table up to `max(set)` fits in half the node cap,
    /// divisor checks are table lookups; otherwise each difference is
    /// searched directly. Both routes are exact.
    pub fn common_divisors(&self, set: &[Rat]) -> Result<Vec<Rat>, OracleError> {
        assert!(!set.is_empty(), "common divisors of an empty set");
        for s in set {
            if !self.is_member(s)? {
                return Err(OracleError::NotAMember { value: s.clone() });
            }
        }
        let min = set.iter().min().cloned().expect("nonempty");
        let max = set.iter().max().cloned().expect("nonempty");
        let candidates = self.enumerate_values(&min)?;

        let mut table_budget = Budget::new(self.node_cap / 2);
        if let Ok(table) = self.value_table(&max, &mut table_budget) {
            let out = exec::filter_collect(candidates, |d| {
                set.iter().all(|s| {
                    let diff = s.checked_sub(d).expect("candidate bounded by min");
                    table.contains(&diff)
                })
            });
            return Ok(out);
        }

        // Fallback: search each difference directly under one shared budget,
        // so an intractable instance overflows after at most `node_cap`
        // nodes total instead of per candidate.
        let mut budget = Budget::new(self.node_cap);
        let mut out = Vec::new();
        for d in candidates {
            let mut ok = true;
            for s in set {
                let diff = s.checked_sub(&d).expect("candidate bounded by min");
                if !self.is_member_budgeted(&diff, &mut budget)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(d);
            }
        }
        Ok(out)
    }

    /// The maximal common divisors of a member set under the truncation's
    /// divisibility order, ascending by value.
    pub fn mcds(&self, set: &[Rat]) -> Result<Vec<Rat>, OracleError> {
        let divisors = self.common_divisors(set)?;
        let mut budget = Budget::new(self.node_cap);
        let mut maximal = Vec::new();
        'outer: for d in &divisors {
            for d2 in &divisors {
                if d2 > d {
                    let diff = d2.checked_sub(d).expect("d2 > d");
                    if self.is_member_budgeted(&diff, &mut budget)? {
                        continue 'outer;
                    }
                }
            }
            maximal.push(d.clone());
        }
        Ok(maximal)
    }

    /// Atom test: `a` is an atom iff no `b` with `0 < b < a` has both `b`
    /// and `a - b` in the truncation.
    pub fn is_atom(&self, a: &Rat) -> Result<bool, OracleError> {
        assert!(!a.is_zero(), "zero is not eligible as an atom");
        if !self.is_member(a)? {
            return Err(OracleError::NotAMember { value: a.clone() });
        }
        let mut budget = Budget::new(self.node_cap);
        let candidates = self.enumerate_values(a)?;
        for b in &candidates {
            if b.is_zero() || b >= a {
                continue;
            }
            let diff = a.checked_sub(b).expect("b < a");
            if self.is_member_budgeted(&diff, &mut budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// DFS over coefficient vectors for `sum coeff_i * w_i = target`, largest
/// weight first, pruning on negative residuals and on residuals not divisible
/// by the gcd of the remaining weights.
fn collect_solutions(
    cleared: &Cleared,
    target: u128,
    pos: usize,
    coeffs: &mut Vec<u64>,
    budget: &mut Budget,
    emit: &mut impl FnMut(&[u64]),
) -> Result<(), Exhausted> {
    budget.tick()?;
    if target == 0 {
        // Remaining coefficients stay zero.
        for c in coeffs[pos..].iter_mut() {
            *c = 0;
        }
        emit(coeffs);
        return Ok(());
    }
    if pos == cleared.weights.len() {
        return Ok(());
    }
    if target % cleared.suffix_gcd[pos] != 0 {
        return Ok(());
    }
    let w = cleared.weights[pos];
    let max_mult = target / w;
    for m in 0..=max_mult {
        coeffs[pos] = m as u64;
        collect_solutions(cleared, target - m * w, pos + 1, coeffs, budget, emit)?;
    }
    coeffs[pos] = 0;
    Ok(())
}

fn find_one_solution(
    weights: &[u128],
    suffix_gcd: &[u128],
    target: u128,
    pos: usize,
    budget: &mut Budget,
) -> Result<bool, Exhausted> {
    budget.tick()?;
    if target == 0 {
        return Ok(true);
    }
    if pos == weights.len() {
        return Ok(false);
    }
    if target % suffix_gcd[pos] != 0 {
        return Ok(false);
    }
    let w = weights[pos];
    // Largest multiplicities first: members are usually found fastest by
    // consuming the big generator greedily.
    let max_mult = target / w;
    for m in (0..=max_mult).rev() {
        if find_one_solution(weights, suffix_gcd, target - m * w, pos + 1, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn enumerate_rec(
    gens: &[Rat],
    pos: usize,
    value: &mut Rat,
    bound: &Rat,
    seen: &mut HashSet<Rat>,
    budget: &mut Budget,
) -> Result<(), Exhausted> {
    budget.tick()?;
    seen.insert(value.clone());
    if pos == gens.len() {
        return Ok(());
    }
    // Without taking g_pos at all:
    enumerate_rec(gens, pos + 1, value, bound, seen, budget)?;
    let mut current = value.clone();
    loop {
        current += &gens[pos];
        if &current > bound {
            break;
        }
        let mut branch = current.clone();
        enumerate_rec(gens, pos + 1, &mut branch, bound, seen, budget)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn oracle(gens: &[&str]) -> Oracle {
        Oracle::with_default_cap(gens.iter().map(|s| r(s)).collect()).unwrap()
    }

    #[test]
    fn factorize_all_examples() {
        let o = oracle(&["1/3", "1/10"]);
        let sols = o.factorize_all(&r("13/30")).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].terms(), &BTreeMap::from([(1, 1), (2, 1)]));

        assert_eq!(o.factorize_all(&r("0")).unwrap(), vec![Factorization::empty()]);
        assert!(o.factorize_all(&r("7/30")).unwrap().is_empty());
    }

    #[test]
    fn factorizations_reevaluate_exactly() {
        let o = oracle(&["1/3", "1/10", "1/28"]);
        let gens: Vec<Rat> = ["1/3", "1/10", "1/28"].iter().map(|s| r(s)).collect();
        for q in ["13/30", "1", "3/4", "337/420"] {
            for f in o.factorize_all(&r(q)).unwrap() {
                assert_eq!(f.value(&gens), r(q), "{f} for {q}");
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(oracle(&["1/10"]).is_member(&r("1/2")).unwrap());
        assert!(oracle(&["1/3"]).is_member(&r("1/3")).unwrap());
        let mp6 = oracle(&["1/10", "1/21", "1/55", "1/91", "1/187", "1/247"]);
        assert!(!mp6.is_member(&r("1/6")).unwrap());
    }

    #[test]
    fn unreachable_valuation_is_false() {
        let o = oracle(&["1/3", "1/10"]);
        assert!(!o.is_member(&r("1/7")).unwrap());
    }

    #[test]
    fn enumerate_values_examples() {
        let o = oracle(&["3", "5"]);
        let vals = o.enumerate_values(&r("10")).unwrap();
        let expect: Vec<Rat> = ["0", "3", "5", "6", "8", "9", "10"].iter().map(|s| r(s)).collect();
        assert_eq!(vals, expect);

        let grams2 = oracle(&["1/3", "1/10"]);
        let vals = grams2.enumerate_values(&r("1/3")).unwrap();
        let expect: Vec<Rat> =
            ["0", "1/10", "1/5", "3/10", "1/3"].iter().map(|s| r(s)).collect();
        assert_eq!(vals, expect);

        assert_eq!(o.enumerate_values(&r("0")).unwrap(), vec![r("0")]);
    }

    #[test]
    fn common_divisors_examples() {
        let o = oracle(&["3", "5"]);
        assert_eq!(o.common_divisors(&[r("8"), r("10")]).unwrap(), vec![r("0"), r("5")]);
        // Singleton: all divisors of q.
        assert_eq!(
            o.common_divisors(&[r("8")]).unwrap(),
            vec![r("0"), r("3"), r("5"), r("8")]
        );
        let grams4 = oracle(&["1/3", "1/10", "1/28", "1/88"]);
        assert_eq!(
            grams4.common_divisors(&[r("1/3"), r("1/10")]).unwrap(),
            vec![r("0")]
        );
    }

    #[test]
    fn mcd_examples() {
        let o = oracle(&["3", "5"]);
        assert_eq!(o.mcds(&[r("8"), r("10")]).unwrap(), vec![r("5")]);
        assert_eq!(o.mcds(&[r("3"), r("5")]).unwrap(), vec![r("0")]);
        let grams2 = oracle(&["1/3", "1/10"]);
        assert_eq!(grams2.mcds(&[r("13/30"), r("23/30")]).unwrap(), vec![r("13/30")]);
    }

    #[test]
    fn atom_examples() {
        let grams3 = oracle(&["1/3", "1/10", "1/28"]);
        assert!(grams3.is_atom(&r("1/10")).unwrap());
        let grams2 = oracle(&["1/3", "1/10"]);
        assert!(!grams2.is_atom(&r("13/30")).unwrap());
        let o = oracle(&["3", "5"]);
        assert!(o.is_atom(&r("3")).unwrap());
    }

    #[test]
    fn overflow_is_loud() {
        let o = Oracle::new(vec![r("1/3"), r("1/10")], 5).unwrap();
        let res = o.factorize_all(&r("100"));
        assert!(matches!(res, Err(OracleError::Overflow { .. })));
    }

    #[test]
    fn completeness_small_scale() {
        // Every combination with <= 6 total copies over K <= 4 generators is
        // recovered by factorize_all.
        let gens: Vec<Rat> = ["1/3", "1/10", "1/28", "1/88"].iter().map(|s| r(s)).collect();
        let o = Oracle::with_default_cap(gens.clone()).unwrap();
        for a in 0..=6u64 {
            for b in 0..=(6 - a) {
                for c in 0..=(6 - a - b) {
                    for d in 0..=(6 - a - b - c) {
                        let mut q = Rat::zero();
                        for (i, &m) in [a, b, c, d].iter().enumerate() {
                            q += &(&gens[i] * m);
                        }
                        let expect = Factorization::new(BTreeMap::from([
                            (1, a),
                            (2, b),
                            (3, c),
                            (4, d),
                        ]));
                        let sols = o.factorize_all(&q).unwrap();
                        assert!(sols.contains(&expect), "missing {expect} for {q}");
                    }
                }
            }
        }
    }
}

//! Prime utilities: deterministic 64-bit primality, prime sequences, and
//! denominator factoring.
//!
//! Every prime sequence used by the monoid families is expressed as a
//! [`PrimeIndexRule`]: the full prime sequence, the odd primes, or an
//! explicit finite prefix. Explicit prefixes are treated as order-complete
//! up to their maximum entry: a prime below the maximum that is not listed
//! is asserted absent from the sequence, while a prime above it raises
//! [`RuleError::TruncationExceeded`].

use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Errors from sequence-rule lookups.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("index {index} exceeds the explicit prefix of length {len}")]
    TruncationExceeded { index: usize, len: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} appears more than once in the prefix")]
    DuplicatePrime(u64),
    #[error("index must be positive")]
    ZeroIndex,
}

/// Errors from factoring denominators.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactorError {
    #[error("{value} has a factor outside the 64-bit primality range")]
    OutOfRange { value: String },
}

/// Deterministic Miller-Rabin for `n < 2^64`.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to
/// be exact for all 64-bit inputs. Larger inputs are rejected upstream.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The `n`-th prime, 1-based: `nth_prime(1) = 2`.
///
/// Backed by a shared, monotonically growing table; lookups are frequent and
/// always small, so cached sieve-by-testing is plenty.
pub fn nth_prime(n: usize) -> u64 {
    assert!(n > 0, "prime indices are 1-based");
    static TABLE: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    let lock = TABLE.get_or_init(|| Mutex::new(vec![2, 3, 5, 7, 11, 13]));
    let mut table = lock.lock().expect("prime table lock");
    while table.len() < n {
        let mut candidate = table.last().copied().unwrap() + 2;
        while !is_prime(candidate) {
            candidate += 2;
        }
        table.push(candidate);
    }
    table[n - 1]
}

/// The `n`-th odd prime, 1-based: `nth_odd_prime(1) = 3`.
pub fn nth_odd_prime(n: usize) -> u64 {
    assert!(n > 0, "prime indices are 1-based");
    nth_prime(n + 1)
}

/// A rule describing a sequence of pairwise distinct primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeIndexRule {
    /// `p_n` = the n-th prime (2, 3, 5, ...); strictly increasing, infinite.
    NthPrime,
    /// `p_n` = the n-th odd prime (3, 5, 7, ...); strictly increasing, infinite.
    NthOddPrime,
    /// A finite explicit prefix of the sequence.
    Explicit(Vec<u64>),
}

impl PrimeIndexRule {
    /// Checks the rule invariants: explicit entries must be pairwise distinct
    /// primes. Named rules are valid by construction.
    pub fn validate(&self) -> Result<(), RuleError> {
        if let PrimeIndexRule::Explicit(primes) = self {
            for &p in primes {
                if !is_prime(p) {
                    return Err(RuleError::NotPrime(p));
                }
            }
            let mut seen = primes.clone();
            seen.sort_unstable();
            if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
                return Err(RuleError::DuplicatePrime(w[0]));
            }
        }
        Ok(())
    }

    /// Number of known terms; `None` for the infinite named rules.
    pub fn len(&self) -> Option<usize> {
        match self {
            PrimeIndexRule::Explicit(p) => Some(p.len()),
            _ => None,
        }
    }

    /// The `n`-th prime of the sequence (1-based).
    pub fn nth(&self, n: usize) -> Result<u64, RuleError> {
        if n == 0 {
            return Err(RuleError::ZeroIndex);
        }
        match self {
            PrimeIndexRule::NthPrime => Ok(nth_prime(n)),
            PrimeIndexRule::NthOddPrime => Ok(nth_odd_prime(n)),
            PrimeIndexRule::Explicit(primes) => {
                primes.get(n - 1).copied().ok_or(RuleError::TruncationExceeded {
                    index: n,
                    len: primes.len(),
                })
            }
        }
    }

    /// Position of `p` in the sequence, or `None` when `p` is provably absent.
    ///
    /// For an explicit prefix, absence is only asserted for primes at most the
    /// prefix maximum; larger primes could appear in the unknown continuation
    /// and raise [`RuleError::TruncationExceeded`].
    pub fn index_of(&self, p: u64) -> Result<Option<usize>, RuleError> {
        if !is_prime(p) {
            return Err(RuleError::NotPrime(p));
        }
        match self {
            PrimeIndexRule::NthPrime => {
                let mut n = 1;
                loop {
                    let q = nth_prime(n);
                    if q == p {
                        return Ok(Some(n));
                    }
                    if q > p {
                        return Ok(None);
                    }
                    n += 1;
                }
            }
            PrimeIndexRule::NthOddPrime => {
                if p == 2 {
                    return Ok(None);
                }
                Ok(self_index_shifted(p))
            }
            PrimeIndexRule::Explicit(primes) => {
                if let Some(pos) = primes.iter().position(|&q| q == p) {
                    return Ok(Some(pos + 1));
                }
                let max = primes.iter().copied().max().unwrap_or(0);
                if p > max {
                    Err(RuleError::TruncationExceeded {
                        index: primes.len() + 1,
                        len: primes.len(),
                    })
                } else {
                    Ok(None)
                }
            }
        }
    }
}

fn self_index_shifted(p: u64) -> Option<usize> {
    let mut n = 1;
    loop {
        let q = nth_odd_prime(n);
        if q == p {
            return Some(n);
        }
        if q > p {
            return None;
        }
        n += 1;
    }
}

/// Prime factorization of a positive integer as `(prime, exponent)` pairs in
/// increasing prime order.
///
/// Trial division by the prime table, falling back to a primality check on
/// the remaining cofactor. Denominators in this crate are products of small
/// sequence primes, so the fallback only guards against misuse.
pub fn factor(n: &BigUint) -> Result<Vec<(u64, u32)>, FactorError> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut remaining = n.clone();
    let mut out = Vec::new();
    let mut idx = 1usize;
    while !remaining.is_one() {
        let p = nth_prime(idx);
        idx += 1;
        let p_big = BigUint::from(p);
        if (&p_big * &p_big) > remaining {
            break;
        }
        let mut exp = 0u32;
        loop {
            use num_integer::Integer;
            let (q, r) = remaining.div_rem(&p_big);
            if r.is_zero() {
                exp += 1;
                remaining = q;
            } else {
                break;
            }
        }
        if exp > 0 {
            out.push((p, exp));
        }
        // Give up trial division past a desk-scale bound and test the cofactor.
        if p > 1_000_003 {
            break;
        }
    }
    if !remaining.is_one() {
        let cofactor = remaining.to_u64().ok_or_else(|| FactorError::OutOfRange {
            value: n.to_string(),
        })?;
        if !is_prime(cofactor) {
            return Err(FactorError::OutOfRange { value: n.to_string() });
        }
        match out.last_mut() {
            Some((p, exp)) if *p == cofactor => *exp += 1,
            _ => out.push((cofactor, 1)),
        }
    }
    out.sort_by_key(|&(p, _)| p);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let primes: Vec<u64> = (0..20).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(is_prime((1u64 << 61) - 1)); // Mersenne prime
        assert!(!is_prime(u64::MAX)); // 3 * 5 * 17 * ...
    }

    #[test]
    fn nth_of_examples() {
        assert_eq!(PrimeIndexRule::NthPrime.nth(1), Ok(2));
        assert_eq!(PrimeIndexRule::NthOddPrime.nth(1), Ok(3));
        assert_eq!(PrimeIndexRule::NthPrime.nth(5), Ok(11));
        assert_eq!(
            PrimeIndexRule::Explicit(vec![3, 5, 7]).nth(4),
            Err(RuleError::TruncationExceeded { index: 4, len: 3 })
        );
    }

    #[test]
    fn index_of_examples() {
        assert_eq!(PrimeIndexRule::NthOddPrime.index_of(7), Ok(Some(3)));
        assert_eq!(PrimeIndexRule::NthOddPrime.index_of(2), Ok(None));
        assert_eq!(
            PrimeIndexRule::Explicit(vec![3, 5, 7]).index_of(11),
            Err(RuleError::TruncationExceeded { index: 4, len: 3 })
        );
        assert_eq!(PrimeIndexRule::Explicit(vec![3, 7]).index_of(5), Ok(None));
        assert_eq!(
            PrimeIndexRule::NthPrime.index_of(4),
            Err(RuleError::NotPrime(4))
        );
    }

    #[test]
    fn rule_round_trip_consistency() {
        for rule in [PrimeIndexRule::NthPrime, PrimeIndexRule::NthOddPrime] {
            for n in 1..=100 {
                let p = rule.nth(n).unwrap();
                assert_eq!(rule.index_of(p), Ok(Some(n)), "rule {rule:?} index {n}");
            }
        }
    }

    #[test]
    fn factor_examples() {
        let f = |n: u64| factor(&BigUint::from(n)).unwrap();
        assert_eq!(f(1), vec![]);
        assert_eq!(f(30), vec![(2, 1), (3, 1), (5, 1)]);
        assert_eq!(f(9240), vec![(2, 3), (3, 1), (5, 1), (7, 1), (11, 1)]);
        assert_eq!(f(1 << 20), vec![(2, 20)]);
        assert_eq!(f(9999999967), vec![(9999999967, 1)]); // prime cofactor
    }

    #[test]
    fn explicit_rule_validation() {
        assert!(PrimeIndexRule::Explicit(vec![3, 5, 7]).validate().is_ok());
        assert_eq!(
            PrimeIndexRule::Explicit(vec![3, 9]).validate(),
            Err(RuleError::NotPrime(9))
        );
        assert!(PrimeIndexRule::Explicit(vec![3, 3]).validate().is_err());
    }
}

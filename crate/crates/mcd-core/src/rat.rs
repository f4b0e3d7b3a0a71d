//! Exact nonnegative rational arithmetic.
//!
//! [`Rat`] is the element type of every monoid in this crate: a fraction of
//! arbitrary-precision nonnegative integers kept in canonical form
//! (`gcd(num, den) = 1`, `den >= 1`, and `0` is stored as `0/1`). Monoid
//! elements are nonnegative, so `Rat` has no subtraction; algorithms that
//! subtract and must detect negativity go through [`SignedRat`] or
//! [`Rat::checked_sub`].
//!
//! Rationals cross every serialization boundary as `"num/den"` strings
//! (integers are emitted as `"n"` and `"n/1"` is accepted on input), never as
//! decimals.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::primes::is_prime;

/// Errors from rational construction, parsing, and valuation queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("the p-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse {input:?} as a nonnegative rational: {reason}")]
    Parse { input: String, reason: String },
}

/// An exact nonnegative rational in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Rat(Ratio<BigUint>);

impl Rat {
    pub fn zero() -> Self {
        Rat(Ratio::zero())
    }

    pub fn one() -> Self {
        Rat(Ratio::one())
    }

    /// Builds `num/den`, reducing to canonical form.
    pub fn new(num: BigUint, den: BigUint) -> Result<Self, RatError> {
        if den.is_zero() {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat(Ratio::new(num, den)))
    }

    pub fn from_u64(n: u64) -> Self {
        Rat(Ratio::from_integer(BigUint::from(n)))
    }

    /// Convenience constructor for small literals. Panics on a zero
    /// denominator, so it is reserved for constants known at the call site.
    pub fn ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(Ratio::new(BigUint::from(num), BigUint::from(den)))
    }

    /// The canonical coprime pair `(num, den)`.
    pub fn num_den(&self) -> (BigUint, BigUint) {
        (self.0.numer().clone(), self.0.denom().clone())
    }

    pub fn num(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn den(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.numer().is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.denom().is_one()
    }

    /// Integer part `floor(self)`.
    pub fn floor_int(&self) -> BigUint {
        self.0.numer() / self.0.denom()
    }

    /// `self - rhs` when the result stays nonnegative, `None` otherwise.
    pub fn checked_sub(&self, rhs: &Rat) -> Option<Rat> {
        if self >= rhs {
            Some(Rat(&self.0 - &rhs.0))
        } else {
            None
        }
    }

    pub fn to_signed(&self) -> SignedRat {
        SignedRat(Ratio::new(
            BigInt::from(self.0.numer().clone()),
            BigInt::from(self.0.denom().clone()),
        ))
    }

    /// `v_p(self) = v_p(num) - v_p(den)` for a prime `p`.
    ///
    /// The valuation of zero is undefined and reported as an error, matching
    /// the usual convention that `v_p(0) = +infinity` has no integer value.
    pub fn padic_valuation(&self, p: u64) -> Result<i64, RatError> {
        if !is_prime(p) {
            return Err(RatError::NotPrime(p));
        }
        if self.is_zero() {
            return Err(RatError::ZeroValuation);
        }
        Ok(valuation_uint(self.0.numer(), p) as i64 - valuation_uint(self.0.denom(), p) as i64)
    }

    /// Residue of a `p`-integral rational modulo `p`, i.e. `num * den^-1 mod p`.
    ///
    /// Callers must ensure `v_p(self) >= 0`; a negative valuation is an
    /// internal misuse and panics.
    pub(crate) fn residue_mod(&self, p: u64) -> u64 {
        let num_mod = big_mod(self.0.numer(), p);
        let den_mod = big_mod(self.0.denom(), p);
        assert!(den_mod != 0, "residue_mod called with v_p < 0");
        num_mod * mod_inverse(den_mod, p) % p
    }
}

/// `v_p(n)` for a nonzero natural number.
pub(crate) fn valuation_uint(n: &BigUint, p: u64) -> u32 {
    assert!(!n.is_zero());
    let p_big = BigUint::from(p);
    let mut v = 0u32;
    let mut cur = n.clone();
    loop {
        let (q, r) = cur.div_rem(&p_big);
        if r.is_zero() {
            v += 1;
            cur = q;
        } else {
            return v;
        }
    }
}

pub(crate) fn big_mod(n: &BigUint, m: u64) -> u64 {
    use num_traits::ToPrimitive;
    (n % BigUint::from(m)).to_u64().expect("residue fits u64")
}

/// Modular inverse of `a` modulo a prime `p`, with `gcd(a, p) = 1`.
pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    // Extended Euclid over i128; p is prime and a is nonzero mod p.
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert!(r0 == 1, "inverse of non-unit");
    t0.rem_euclid(p as i128) as u64
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Rat> for &Rat {
    type Output = Rat;
    fn add(self, rhs: &'a Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Rat> for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &'a Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl Mul<u64> for &Rat {
    type Output = Rat;
    fn mul(self, rhs: u64) -> Rat {
        Rat(&self.0 * Ratio::from_integer(BigUint::from(rhs)))
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

// Debug reuses Display; rationals read better as `13/30` than as a struct dump.
impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = RatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_part = |part: &str| -> Result<BigUint, RatError> {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(RatError::Parse {
                    input: s.to_string(),
                    reason: "expected digits, optionally split by a single '/'".into(),
                });
            }
            part.parse::<BigUint>().map_err(|e| RatError::Parse {
                input: s.to_string(),
                reason: e.to_string(),
            })
        };
        match s.split_once('/') {
            None => Ok(Rat(Ratio::from_integer(parse_part(s)?))),
            Some((n, d)) => {
                let num = parse_part(n)?;
                let den = parse_part(d)?;
                if den.is_zero() {
                    return Err(RatError::Parse {
                        input: s.to_string(),
                        reason: "zero denominator".into(),
                    });
                }
                Ok(Rat(Ratio::new(num, den)))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Signed sibling of [`Rat`] for intermediate arithmetic.
///
/// Decomposition algorithms subtract candidate summands and use a negative
/// residual as a failure signal; this type carries those intermediates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedRat(Ratio<BigInt>);

impl SignedRat {
    pub fn zero() -> Self {
        SignedRat(Ratio::zero())
    }

    pub fn is_negative(&self) -> bool {
        self.0.numer().sign() == Sign::Minus
    }

    pub fn is_zero(&self) -> bool {
        self.0.numer().is_zero()
    }

    /// Converts back to `Rat`; `None` when negative.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.is_negative() {
            return None;
        }
        let num = self.0.numer().magnitude().clone();
        let den = self.0.denom().magnitude().clone();
        Some(Rat(Ratio::new(num, den)))
    }

    pub fn sub(&self, rhs: &SignedRat) -> SignedRat {
        SignedRat(&self.0 - &rhs.0)
    }

    pub fn add(&self, rhs: &SignedRat) -> SignedRat {
        SignedRat(&self.0 + &rhs.0)
    }

    pub fn abs(&self) -> SignedRat {
        SignedRat(self.0.abs())
    }
}

impl fmt::Display for SignedRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for SignedRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn num_den_is_canonical() {
        assert_eq!(r("13/30").num_den(), (13u32.into(), 30u32.into()));
        assert_eq!(r("10/4").num_den(), (5u32.into(), 2u32.into()));
        assert_eq!(r("0").num_den(), (0u32.into(), 1u32.into()));
        assert_eq!(r("0/7").num_den(), (0u32.into(), 1u32.into()));
    }

    #[test]
    fn padic_valuation_examples() {
        assert_eq!(r("13/30").padic_valuation(5), Ok(-1));
        assert_eq!(r("9").padic_valuation(3), Ok(2));
        assert_eq!(r("1/3").padic_valuation(2), Ok(0));
        assert_eq!(r("0").padic_valuation(2), Err(RatError::ZeroValuation));
        assert_eq!(r("1/2").padic_valuation(6), Err(RatError::NotPrime(6)));
    }

    #[test]
    fn display_round_trip() {
        for s in ["0", "7", "13/30", "5/2", "1/1048576"] {
            assert_eq!(r(s).to_string(), s);
        }
        // n/1 accepted on input, emitted as n
        assert_eq!(r("7/1").to_string(), "7");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "-1", "1/-2", "1/0", "a/b", "1/2/3", "1.5"] {
            assert!(s.parse::<Rat>().is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn checked_sub_detects_negative() {
        assert_eq!(r("1/2").checked_sub(&r("1/3")), Some(r("1/6")));
        assert_eq!(r("1/3").checked_sub(&r("1/2")), None);
        assert_eq!(r("1/3").checked_sub(&r("1/3")), Some(Rat::zero()));
    }

    #[test]
    fn residue_mod_inverts_denominator() {
        // 13/6 mod 5: 6^-1 = 1 mod 5, 13 = 3 mod 5
        assert_eq!(r("13/6").residue_mod(5), 3);
        assert_eq!(r("7/3").residue_mod(5), 4); // 3^-1 = 2, 7*2 = 14 = 4
    }

    proptest! {
        #[test]
        fn arithmetic_closure(a_n in 0u64..1000, a_d in 1u64..1000, b_n in 0u64..1000, b_d in 1u64..1000) {
            let a = Rat::ratio(a_n, a_d);
            let b = Rat::ratio(b_n, b_d);
            let sum = &a + &b;
            // (a+b)-b = a exactly, and the result is canonical
            prop_assert_eq!(sum.checked_sub(&b).unwrap(), a.clone());
            let (n, d) = sum.num_den();
            prop_assert!(n.gcd(&d).is_one() || n.is_zero());
        }

        #[test]
        fn valuation_additive(a_n in 1u64..5000, a_d in 1u64..5000, b_n in 1u64..5000, b_d in 1u64..5000,
                              p_idx in 0usize..5) {
            let p = [2u64, 3, 5, 7, 11][p_idx];
            let a = Rat::ratio(a_n, a_d);
            let b = Rat::ratio(b_n, b_d);
            let prod = &a * &b;
            prop_assert_eq!(
                prod.padic_valuation(p).unwrap(),
                a.padic_valuation(p).unwrap() + b.padic_valuation(p).unwrap()
            );
        }

        #[test]
        fn serde_round_trip(n in 0u64..10_000, d in 1u64..10_000) {
            let q = Rat::ratio(n, d);
            let json = serde_json::to_string(&q).unwrap();
            let back: Rat = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, q);
        }
    }
}

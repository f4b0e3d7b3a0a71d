//! A rank-2 atomic monoid in which the pair `{(1,0), (1,1)}` has no maximal
//! common divisor.
//!
//! The monoid lives in `Q^2_{>=0}` and is generated, over the full prime
//! sequence `p_1 = 2, p_2 = 3, ...`, by the atoms
//!
//! ```text
//!   g_n = (1/(2^n p_{2n}),     0          )
//!   h_n = (1/(2^n p_{2n+1}),   1/p_{2n+1} )
//! ```
//!
//! Membership is decided exactly: each odd prime appears in exactly one
//! atom's denominators, so its coefficient is forced modulo that prime by the
//! valuations of the target, and what remains is a dyadic feasibility check.
//! A point can be expressible only with atoms beyond the configured
//! truncation (the dyadic remainder needs a finer grid); that outcome is kept
//! distinct from non-membership, which is always definitive.
//!
//! Common divisors of `{(1,0), (1,1)}` can be strictly improved forever along
//! the family `(1 - 1/2^n, 0)`, which is how the no-MCD report is produced.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::primes::{self, nth_prime};
use crate::rat::{Rat, RatError};
use crate::ThreeVal;

/// A point of `Q^2_{>=0}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rat2 {
    pub x: Rat,
    pub y: Rat,
}

impl Rat2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Rat2 { x, y }
    }

    pub fn zero() -> Self {
        Rat2 { x: Rat::zero(), y: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, rhs: &Rat2) -> Rat2 {
        Rat2 { x: &self.x + &rhs.x, y: &self.y + &rhs.y }
    }

    /// Componentwise subtraction, `None` when any coordinate goes negative.
    pub fn checked_sub(&self, rhs: &Rat2) -> Option<Rat2> {
        Some(Rat2 {
            x: self.x.checked_sub(&rhs.x)?,
            y: self.y.checked_sub(&rhs.y)?,
        })
    }
}

impl fmt::Display for Rat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl FromStr for Rat2 {
    type Err = RatError;

    /// Parses `"x,y"`, e.g. `"1/2,1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s.split_once(',').ok_or_else(|| RatError::Parse {
            input: s.to_string(),
            reason: "expected \"x,y\"".into(),
        })?;
        Ok(Rat2 { x: x.trim().parse()?, y: y.trim().parse()? })
    }
}

/// Coordinate projections; both are monoid homomorphisms.
pub fn project(point: &Rat2, axis: u8) -> Rat {
    match axis {
        1 => point.x.clone(),
        2 => point.y.clone(),
        _ => panic!("axis must be 1 or 2"),
    }
}

/// The fixed rank-2 monoid at a truncation index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rank2Monoid {
    truncation: usize,
}

/// Why a point is definitively not a member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NotMember2 {
    /// A prime appears in a coordinate where no atom can supply it.
    UnreachablePrime { prime: u64 },
    /// A valuation is below -1, deeper than any atom combination reaches.
    ValuationTooNegative { prime: u64 },
    /// The two coordinates force different residues on the same coefficient.
    InconsistentResidues { prime: u64 },
    /// Subtracting the forced contributions leaves a negative remainder.
    NegativeRemainder,
    /// The second coordinate needs more atom copies than the first affords.
    InsufficientDyadicBudget,
}

/// Exact membership outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Membership2 {
    /// Expressible over the atoms of this truncation.
    InTruncation,
    /// A member of the monoid, but only via atoms beyond the truncation.
    BeyondTruncation,
    /// Not a member at any truncation.
    NotMember(NotMember2),
}

/// Errors from rank-2 operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Rank2Error {
    #[error("cannot factor denominator: {0}")]
    Factor(#[from] primes::FactorError),
    #[error("{value} is not a common divisor of the target pair")]
    NotACommonDivisor { value: String },
    #[error("{value} is not a member")]
    NotAMember { value: String },
    #[error("no improvement index found within {searched} steps")]
    ImprovementNotFound { searched: usize },
}

impl Rank2Monoid {
    pub fn new(truncation: usize) -> Self {
        assert!(truncation > 0, "truncation must be positive");
        Rank2Monoid { truncation }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// The atom pair `(g_n, h_n)`.
    pub fn atom_pair(&self, n: usize) -> (Rat2, Rat2) {
        let pow = BigUint::one() << n;
        let g = Rat2 {
            x: Rat::new(BigUint::one(), &pow * BigUint::from(nth_prime(2 * n))).unwrap(),
            y: Rat::zero(),
        };
        let h = Rat2 {
            x: Rat::new(BigUint::one(), &pow * BigUint::from(nth_prime(2 * n + 1))).unwrap(),
            y: Rat::new(BigUint::one(), BigUint::from(nth_prime(2 * n + 1))).unwrap(),
        };
        (g, h)
    }

    /// Exact membership decision for a point of `Q^2_{>=0}`.
    pub fn decide_membership(&self, q: &Rat2) -> Result<Membership2, Rank2Error> {
        use Membership2::*;
        use NotMember2::*;

        // The second coordinate is a sum of beta_n / p_{2n+1}: its
        // denominator must be squarefree over odd-position primes.
        let mut beta_forced: Vec<(usize, u64, u64)> = Vec::new(); // (n, p, residue)
        for (p, exp) in primes::factor(q.y.den())? {
            let idx = position_of_prime(p);
            if p == 2 || idx % 2 == 0 {
                return Ok(NotMember(UnreachablePrime { prime: p }));
            }
            if exp > 1 {
                return Ok(NotMember(ValuationTooNegative { prime: p }));
            }
            let n = (idx - 1) / 2;
            if n == 0 {
                return Ok(NotMember(UnreachablePrime { prime: p }));
            }
            // Unique residue r in [0, p-1] with v_p(y - r/p) >= 0.
            let r = forced_residue(&q.y, p, &BigUint::from(p));
            beta_forced.push((n, p, r));
        }

        // First coordinate: odd primes are forced; powers of 2 are the free
        // dyadic machinery.
        let mut alpha_forced: Vec<(usize, u64, u64)> = Vec::new();
        for (p, exp) in primes::factor(q.x.den())? {
            if p == 2 {
                continue;
            }
            if exp > 1 {
                return Ok(NotMember(ValuationTooNegative { prime: p }));
            }
            let idx = position_of_prime(p);
            if idx % 2 == 0 {
                let n = idx / 2;
                let den = (BigUint::one() << n) * BigUint::from(p);
                let r = forced_residue(&q.x, p, &den);
                alpha_forced.push((n, p, r));
            } else {
                let n = (idx - 1) / 2;
                if n == 0 {
                    return Ok(NotMember(UnreachablePrime { prime: p }));
                }
                let den = (BigUint::one() << n) * BigUint::from(p);
                let r = forced_residue(&q.x, p, &den);
                match beta_forced.iter().find(|&&(m, _, _)| m == n) {
                    Some(&(_, _, ry)) if ry != r => {
                        return Ok(NotMember(InconsistentResidues { prime: p }));
                    }
                    Some(_) => {} // consistent, already recorded
                    None => {
                        // y has no pole at p, so the y-side forces residue 0.
                        if r != 0 {
                            return Ok(NotMember(InconsistentResidues { prime: p }));
                        }
                    }
                }
            }
        }
        // Beta coefficients forced by y must also be consistent with x: when
        // x has no pole at p the forced x-residue is 0, which contradicts a
        // nonzero y-residue.
        for &(n, p, ry) in &beta_forced {
            let den = (BigUint::one() << n) * BigUint::from(p);
            let rx = forced_residue(&q.x, p, &den);
            if rx != ry {
                return Ok(NotMember(InconsistentResidues { prime: p }));
            }
        }

        // Subtract forced minimal contributions.
        let mut x_rem = q.x.to_signed();
        let mut y_rem = q.y.to_signed();
        let mut max_index = 0usize;
        for &(n, p, r) in &alpha_forced {
            max_index = max_index.max(n);
            let den = (BigUint::one() << n) * BigUint::from(p);
            x_rem = x_rem.sub(&Rat::new(BigUint::from(r), den).unwrap().to_signed());
        }
        for &(n, p, r) in &beta_forced {
            max_index = max_index.max(n);
            let den = (BigUint::one() << n) * BigUint::from(p);
            x_rem = x_rem.sub(&Rat::new(BigUint::from(r), den).unwrap().to_signed());
            y_rem = y_rem.sub(&Rat::new(BigUint::from(r), BigUint::from(p)).unwrap().to_signed());
        }
        let Some(x_rem) = x_rem.to_rat() else {
            return Ok(NotMember(NegativeRemainder));
        };
        let Some(y_rem) = y_rem.to_rat() else {
            return Ok(NotMember(NegativeRemainder));
        };
        debug_assert!(y_rem.is_integer(), "forcing clears every y pole");
        debug_assert!(
            primes::factor(x_rem.den()).unwrap().iter().all(|&(p, _)| p == 2),
            "forcing clears every odd x pole"
        );

        // What remains: bump any coefficient by a multiple of its prime.
        // Bumping beta_n by p_{2n+1} adds 1 to y and 1/2^n to x; bumping
        // alpha_n by p_{2n} adds 1/2^n to x. So the remainder is expressible
        // in the full monoid iff x_rem > 0, or x_rem = 0 with y_rem = 0.
        if x_rem.is_zero() && !y_rem.is_zero() {
            return Ok(NotMember(InsufficientDyadicBudget));
        }

        // Within this truncation the free dyadic grid is 1/2^K: every forced
        // index must be in range, the x remainder must sit on the grid, and
        // each unit of y remainder consumes at least one grid cell of x.
        let k = self.truncation;
        let grid_cells = &x_rem * &Rat::new(BigUint::one() << k, BigUint::one()).unwrap();
        if max_index <= k && grid_cells.is_integer() && grid_cells >= y_rem {
            Ok(InTruncation)
        } else {
            Ok(BeyondTruncation)
        }
    }

    /// Membership in the truncation: `true` when expressible over atoms up to
    /// the truncation, `unknown` when the point is only reachable beyond it,
    /// `false` when it is not a member at all.
    pub fn is_member(&self, q: &Rat2) -> Result<ThreeVal, Rank2Error> {
        Ok(match self.decide_membership(q)? {
            Membership2::InTruncation => ThreeVal::True,
            Membership2::BeyondTruncation => ThreeVal::Unknown { truncation: self.truncation },
            Membership2::NotMember(_) => ThreeVal::False,
        })
    }

    /// Divisibility in the full monoid: `b - a` is a member (at any
    /// truncation depth).
    pub fn divides_in_monoid(&self, a: &Rat2, b: &Rat2) -> Result<bool, Rank2Error> {
        let Some(diff) = b.checked_sub(a) else {
            return Ok(false);
        };
        Ok(!matches!(self.decide_membership(&diff)?, Membership2::NotMember(_)))
    }
}

/// The pair whose common divisors admit no maximal element.
pub fn target_pair() -> (Rat2, Rat2) {
    (
        Rat2::new(Rat::one(), Rat::zero()),
        Rat2::new(Rat::one(), Rat::one()),
    )
}

/// A verified strict improvement of a common divisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Improvement {
    /// The improved divisor `(1 - 1/2^n, 0)`.
    pub value: Rat2,
    /// The exponent `n` used.
    pub n: usize,
    /// Whether the improvement itself lies in the configured truncation.
    pub within_truncation: bool,
}

/// One analyzed common divisor in the no-MCD report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorEntry {
    pub divisor: Rat2,
    /// Smallest `n` with the divisor dividing `(1 - 1/2^n, 0)`.
    pub divides_dyadic_cap: usize,
    pub improvement: Improvement,
    /// The improvement minus the divisor: the nonzero witness of strictness.
    pub gap: Rat2,
}

/// Report: every common divisor of `{(1,0), (1,1)}` found in the truncation
/// has a verified, strictly larger common divisor, so none of them is
/// maximal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoMcdReport {
    pub truncation: usize,
    pub pair: (Rat2, Rat2),
    /// `(0,1)` is not a member; recorded because the analysis depends on it.
    pub second_axis_rejected: bool,
    pub divisors: Vec<DivisorEntry>,
    pub all_strictly_improved: bool,
}

impl Rank2Monoid {
    /// Whether `d` is a common divisor of `{(1,0), (1,1)}` in the monoid.
    pub fn is_common_divisor_of_pair(&self, d: &Rat2) -> Result<bool, Rank2Error> {
        let (a, b) = target_pair();
        Ok(self.divides_in_monoid(d, &a)? && self.divides_in_monoid(d, &b)?)
    }

    /// Strictly improves a common divisor of `{(1,0), (1,1)}`: the smallest
    /// `n` with `d` properly dividing `(1 - 1/2^n, 0)` yields another,
    /// strictly larger common divisor. The search is bounded by
    /// `truncation + 8` exponents and reports failure past that.
    pub fn improve_divisor(&self, d: &Rat2) -> Result<Improvement, Rank2Error> {
        if !self.is_common_divisor_of_pair(d)? {
            return Err(Rank2Error::NotACommonDivisor { value: d.to_string() });
        }
        let limit = self.truncation + 8;
        for n in 1..=limit {
            let target = Rat2::new(
                Rat::one().checked_sub(&dyadic(n)).expect("n >= 1"),
                Rat::zero(),
            );
            if target == *d {
                continue;
            }
            if self.divides_in_monoid(d, &target)? {
                let within =
                    matches!(self.decide_membership(&target)?, Membership2::InTruncation);
                return Ok(Improvement { value: target, n, within_truncation: within });
            }
        }
        Err(Rank2Error::ImprovementNotFound { searched: limit })
    }

    /// Iterates `improve_divisor` from zero, producing the canonical
    /// improvement chain `(1/2, 0), (3/4, 0), (7/8, 0), ...`.
    pub fn improvement_chain(&self, steps: usize) -> Result<Vec<Rat2>, Rank2Error> {
        let mut out = Vec::with_capacity(steps);
        let mut current = Rat2::zero();
        for _ in 0..steps {
            let improved = self.improve_divisor(&current)?;
            current = improved.value.clone();
            out.push(improved.value);
        }
        Ok(out)
    }

    /// Enumerates every common divisor of `{(1,0), (1,1)}` expressible in
    /// this truncation and verifies a strict improvement for each.
    ///
    /// Common divisors of the pair have a zero second coordinate, so the
    /// enumeration ranges over combinations of the `g_n` atoms bounded by 1.
    pub fn verify_not_two_mcd(&self) -> Result<NoMcdReport, Rank2Error> {
        let pair = target_pair();
        let candidates = self.enumerate_first_axis(&Rat::one());
        let flags = crate::exec::map_collect(&candidates, |d| {
            self.is_common_divisor_of_pair(d)
        });
        let mut divisors = Vec::new();
        for (d, flag) in candidates.into_iter().zip(flags) {
            if !flag? {
                continue;
            }
            let improvement = self.improve_divisor(&d)?;
            let gap = improvement
                .value
                .checked_sub(&d)
                .expect("improvement dominates the divisor");
            // Smallest dyadic cap the divisor divides; by construction of
            // the improvement it is at most the improvement's n.
            let mut cap = improvement.n;
            for n in 1..=improvement.n {
                let target = Rat2::new(
                    Rat::one().checked_sub(&dyadic(n)).expect("n >= 1"),
                    Rat::zero(),
                );
                if self.divides_in_monoid(&d, &target)? {
                    cap = n;
                    break;
                }
            }
            divisors.push(DivisorEntry {
                divisor: d,
                divides_dyadic_cap: cap,
                improvement,
                gap,
            });
        }
        let all_strictly_improved = divisors.iter().all(|e| !e.gap.is_zero());
        let second_axis_rejected = matches!(
            self.decide_membership(&Rat2::new(Rat::zero(), Rat::one()))?,
            Membership2::NotMember(_)
        );
        Ok(NoMcdReport {
            truncation: self.truncation,
            pair,
            second_axis_rejected,
            divisors,
            all_strictly_improved,
        })
    }

    /// All truncation elements with zero second coordinate and first
    /// coordinate at most `bound`, ascending lexicographically.
    fn enumerate_first_axis(&self, bound: &Rat) -> Vec<Rat2> {
        let gens: Vec<Rat> = (1..=self.truncation)
            .map(|n| self.atom_pair(n).0.x)
            .collect();
        let mut values = std::collections::BTreeSet::new();
        let mut stack = vec![(0usize, Rat::zero())];
        while let Some((pos, value)) = stack.pop() {
            values.insert(value.clone());
            if pos == gens.len() {
                continue;
            }
            stack.push((pos + 1, value.clone()));
            let mut current = value;
            loop {
                current += &gens[pos];
                if &current > bound {
                    break;
                }
                stack.push((pos + 1, current.clone()));
            }
        }
        values
            .into_iter()
            .map(|x| Rat2::new(x, Rat::zero()))
            .collect()
    }

    /// Rank-2 atom check by exhaustive split search: `a` is an atom iff no
    /// nonzero truncation member `b` componentwise below `a` leaves `a - b`
    /// in the truncation.
    pub fn is_atom_bruteforce(&self, a: &Rat2) -> Result<bool, Rank2Error> {
        if matches!(self.decide_membership(a)?, Membership2::NotMember(_)) {
            return Err(Rank2Error::NotAMember { value: a.to_string() });
        }
        let splits = self.enumerate_members_below(a);
        for b in &splits {
            if b.is_zero() || b == a {
                continue;
            }
            let Some(rest) = a.checked_sub(b) else { continue };
            if matches!(self.decide_membership(&rest)?, Membership2::InTruncation) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Truncation members componentwise at most `bound`.
    fn enumerate_members_below(&self, bound: &Rat2) -> Vec<Rat2> {
        let mut atoms = Vec::new();
        for n in 1..=self.truncation {
            let (g, h) = self.atom_pair(n);
            atoms.push(g);
            atoms.push(h);
        }
        let mut values = std::collections::BTreeSet::new();
        let mut stack = vec![(0usize, Rat2::zero())];
        while let Some((pos, value)) = stack.pop() {
            values.insert(value.clone());
            if pos == atoms.len() {
                continue;
            }
            stack.push((pos + 1, value.clone()));
            let mut current = value;
            loop {
                current = current.add(&atoms[pos]);
                if current.x > bound.x || current.y > bound.y {
                    break;
                }
                stack.push((pos + 1, current.clone()));
            }
        }
        values.into_iter().collect()
    }
}

/// `1/2^n`.
fn dyadic(n: usize) -> Rat {
    Rat::new(BigUint::one(), BigUint::one() << n).unwrap()
}

/// 1-based position of a prime in the full prime sequence.
fn position_of_prime(p: u64) -> usize {
    let mut n = 1;
    loop {
        let q = nth_prime(n);
        if q == p {
            return n;
        }
        assert!(q < p, "{p} is not prime");
        n += 1;
    }
}

/// The unique residue `r` in `[0, p-1]` with `v_p(q - r/den) >= 0`, where
/// `den` carries `p` exactly once and `v_p(q) >= -1`.
fn forced_residue(q: &Rat, p: u64, den: &BigUint) -> u64 {
    if q.is_zero() {
        return 0;
    }
    if crate::rat::valuation_uint(q.den(), p) == 0 {
        return 0;
    }
    // v_p(q) = -1: r/den must match q's residue. Multiply q by den: the
    // result is p-integral, and r = (q * den) mod p.
    let scaled = q * &Rat::new(den.clone(), BigUint::one()).unwrap();
    scaled.residue_mod(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn pt(s: &str) -> Rat2 {
        s.parse().unwrap()
    }

    #[test]
    fn projections() {
        let p = pt("1/2,1");
        assert_eq!(project(&p, 1), r("1/2"));
        assert_eq!(project(&p, 2), r("1"));
        assert_eq!(project(&Rat2::zero(), 1), Rat::zero());
    }

    #[test]
    fn atom_pairs() {
        let m = Rank2Monoid::new(3);
        let (g1, h1) = m.atom_pair(1);
        assert_eq!(g1, pt("1/6,0"));
        assert_eq!(h1, pt("1/10,1/5"));
        let (g2, h2) = m.atom_pair(2);
        assert_eq!(g2, pt("1/28,0"));
        assert_eq!(h2, pt("1/44,1/11"));
    }

    #[test]
    fn membership_examples() {
        let m = Rank2Monoid::new(1);
        // 5 * h_1 = (1/2, 1)
        assert_eq!(m.is_member(&pt("1/2,1")).unwrap(), ThreeVal::True);
        // Every generator is positive under the first projection.
        assert_eq!(m.is_member(&pt("0,1")).unwrap(), ThreeVal::False);
        // The atom g_1 itself.
        assert_eq!(m.is_member(&pt("1/6,0")).unwrap(), ThreeVal::True);
    }

    #[test]
    fn beyond_truncation_is_unknown_not_false() {
        let m1 = Rank2Monoid::new(1);
        // (1/4, 0) = 7 * g_2 needs the second atom pair.
        assert_eq!(
            m1.is_member(&pt("1/4,0")).unwrap(),
            ThreeVal::Unknown { truncation: 1 }
        );
        let m2 = Rank2Monoid::new(2);
        assert_eq!(m2.is_member(&pt("1/4,0")).unwrap(), ThreeVal::True);
    }

    #[test]
    fn dyadic_closure_samples() {
        // (d, 0) and (d, 1) are members for sampled positive dyadics d.
        let m = Rank2Monoid::new(4);
        for d in ["1/2", "1/4", "3/4", "1", "3/2"] {
            let p0 = Rat2::new(r(d), Rat::zero());
            let p1 = Rat2::new(r(d), Rat::one());
            assert_eq!(m.is_member(&p0).unwrap(), ThreeVal::True, "({d},0)");
            assert_eq!(m.is_member(&p1).unwrap(), ThreeVal::True, "({d},1)");
        }
    }

    #[test]
    fn inconsistent_residues_rejected() {
        let m = Rank2Monoid::new(2);
        // (1/5, 0): p = 5 = p_3 sits in h_1; the y coordinate forces residue
        // 0 while x forces a nonzero one.
        assert_eq!(m.is_member(&pt("1/5,0")).unwrap(), ThreeVal::False);
        // (0, 1/5) needs h_1 once mod 5 in y but x cannot pay for it.
        assert_eq!(m.is_member(&pt("0,1/5")).unwrap(), ThreeVal::False);
    }
}

//! Canonical decompositions and MCD search for Grams-like monoids.
//!
//! A Grams-like monoid `M = <1/(d_n p_n)>` comes with the companion monoid
//! `N = <1/d_n>`. Because each `p_n` divides no `d_m` and the primes are
//! pairwise distinct, every element of `M` has exactly one expression
//!
//! ```text
//!   q = c_0(q) + sum_n c_n(q) / (d_n p_n),   c_0(q) in N,  0 <= c_n < p_n,
//! ```
//!
//! the *canonical decomposition*. The coefficient `c_n` is forced by the
//! `p_n`-adic valuation of `q`, so decomposition doubles as a membership
//! decider: compute the forced coefficients, subtract, and test the residual
//! for membership in `N`.
//!
//! When `N` is a valuation monoid (the `d_n` form a divisor chain), `M` has
//! maximal common divisors and [`mcd`] computes one constructively: shift by
//! the minimum `c_0`-part, then take the largest element of the finitely
//! generated fragment `F = <1/(d_i p_i) : i <= k>` that still divides
//! everything. Coefficient-wise enumeration of the same fragment recovers
//! every MCD with a given `c_0`-part and verifies the finiteness bound
//! `prod_{i<=k} p_i`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::budget::{Budget, Exhausted};
use crate::exec;
use crate::primes::{self, PrimeIndexRule};
use crate::rat::Rat;
use crate::spec::{DenominatorRule, GramsSpec, SpecError};
use crate::ThreeVal;

/// The canonical decomposition of a member: the `N`-part and the sparse
/// coefficient map `n -> c_n` with `1 <= c_n <= p_n - 1` (zero coefficients
/// are omitted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalDecomp {
    pub c0: Rat,
    pub coeffs: BTreeMap<usize, u64>,
}

impl CanonicalDecomp {
    /// Reconstructs the decomposed element exactly.
    pub fn value(&self, spec: &GramsSpec) -> Result<Rat, SpecError> {
        let mut acc = self.c0.clone();
        for (&n, &c) in &self.coeffs {
            acc += &(&spec.generator(n)? * c);
        }
        Ok(acc)
    }

    /// Largest index carrying a nonzero coefficient.
    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, n: usize) -> u64 {
        self.coeffs.get(&n).copied().unwrap_or(0)
    }
}

/// Stage at which a decomposition attempt failed; these are definitive
/// non-membership verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotMemberReason {
    /// Some `v_{p_n}(q) < -1`: no coefficient below `p_n` can repair it.
    ValuationTooNegative { prime: u64 },
    /// Subtracting the forced coefficients went below zero.
    NegativeResidual,
    /// The residual is nonnegative but lies outside `N`.
    ResidualNotInN,
}

/// Outcome of a membership/decomposition query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Membership {
    Member(CanonicalDecomp),
    NotMember(NotMemberReason),
    /// The companion-monoid test was inconclusive at this truncation.
    Unknown { truncation: usize },
}

impl Membership {
    pub fn three_val(&self) -> ThreeVal {
        match self {
            Membership::Member(_) => ThreeVal::True,
            Membership::NotMember(_) => ThreeVal::False,
            Membership::Unknown { truncation } => ThreeVal::Unknown { truncation: *truncation },
        }
    }

    pub fn decomp(&self) -> Option<&CanonicalDecomp> {
        match self {
            Membership::Member(d) => Some(d),
            _ => None,
        }
    }
}

/// Errors from Grams-like operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GramsError {
    #[error("prime {prime} in the denominator cannot be classified at truncation {truncation}")]
    UnclassifiablePrime { prime: u64, truncation: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Factor(#[from] primes::FactorError),
    #[error("search budget exhausted after {nodes} nodes")]
    Overflow { nodes: u64 },
    #[error("the MCD search requires the companion monoid to be a valuation monoid")]
    NotValuation,
    #[error("{value} is not a member (or membership is unknown at this truncation)")]
    NotAMember { value: Rat },
    #[error("membership inconclusive at truncation {truncation}")]
    Inconclusive { truncation: usize },
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

impl From<Exhausted> for GramsError {
    fn from(e: Exhausted) -> Self {
        GramsError::Overflow { nodes: e.cap }
    }
}

/// How a prime factor of a denominator relates to the spec's sequences.
enum PrimeClass {
    Sequence(usize),
    DFactor,
}

fn classify_prime(spec: &GramsSpec, p: u64) -> Result<PrimeClass, GramsError> {
    match spec.p_rule().index_of(p) {
        Ok(Some(n)) => return Ok(PrimeClass::Sequence(n)),
        Ok(None) => {}
        Err(primes::RuleError::TruncationExceeded { .. }) => {
            return Err(GramsError::UnclassifiablePrime { prime: p, truncation: spec.truncation() })
        }
        Err(e) => return Err(GramsError::Spec(SpecError::Rule(e))),
    }
    // Not a sequence prime: it must divide some d_m.
    match spec.d_rule() {
        DenominatorRule::Pow2 => {
            if p == 2 {
                Ok(PrimeClass::DFactor)
            } else {
                Err(GramsError::UnclassifiablePrime { prime: p, truncation: spec.truncation() })
            }
        }
        DenominatorRule::Explicit(values) => {
            let p_big = BigUint::from(p);
            let k = spec.truncation().min(values.len());
            for d in &values[..k] {
                if (d % &p_big).is_zero() {
                    return Ok(PrimeClass::DFactor);
                }
            }
            Err(GramsError::UnclassifiablePrime { prime: p, truncation: spec.truncation() })
        }
    }
}

/// Membership in the companion monoid `N = <1/d_n>`.
///
/// For the pow2 rule the criterion "the denominator is a power of 2" is
/// exact. For explicit divisor chains, membership holds iff the denominator
/// divides some known `d_n`; a negative answer is only `Unknown` because the
/// chain may continue past the truncation. Without the divisor-chain
/// property the question falls back to the brute-force oracle on the known
/// companion generators.
pub fn is_member_companion(q: &Rat, spec: &GramsSpec) -> Result<ThreeVal, GramsError> {
    if q.is_zero() {
        return Ok(ThreeVal::True);
    }
    match spec.d_rule() {
        DenominatorRule::Pow2 => {
            let factors = primes::factor(q.den())?;
            let dyadic = factors.iter().all(|&(p, _)| p == 2);
            Ok(if dyadic { ThreeVal::True } else { ThreeVal::False })
        }
        DenominatorRule::Explicit(values) => {
            let k = spec.truncation().min(values.len());
            if spec.n_is_valuation() {
                for d in &values[..k] {
                    if (d % q.den()).is_zero() {
                        return Ok(ThreeVal::True);
                    }
                }
                Ok(ThreeVal::Unknown { truncation: spec.truncation() })
            } else {
                let gens: Result<Vec<Rat>, _> =
                    (1..=k).map(|n| spec.companion_generator(n)).collect();
                let oracle = crate::oracle::Oracle::with_default_cap(gens?)
                    .map_err(|e| GramsError::InternalInvariant(e.to_string()))?;
                match oracle.is_member(q) {
                    Ok(true) => Ok(ThreeVal::True),
                    Ok(false) => Ok(ThreeVal::Unknown { truncation: spec.truncation() }),
                    Err(crate::oracle::OracleError::Overflow { nodes }) => {
                        Err(GramsError::Overflow { nodes })
                    }
                    Err(e) => Err(GramsError::InternalInvariant(e.to_string())),
                }
            }
        }
    }
}

/// Computes the canonical decomposition of `q`, or reports why `q` is not a
/// member.
///
/// For each sequence prime `p_n` dividing the denominator, the coefficient
/// `c_n` is the unique residue in `[0, p_n - 1]` making
/// `v_{p_n}(q - c_n/(d_n p_n))` nonnegative; the residual must then lie in
/// the companion monoid.
pub fn canonical_decompose(q: &Rat, spec: &GramsSpec) -> Result<Membership, GramsError> {
    if q.is_zero() {
        return Ok(Membership::Member(CanonicalDecomp {
            c0: Rat::zero(),
            coeffs: BTreeMap::new(),
        }));
    }
    let mut coeffs = BTreeMap::new();
    let mut residual = q.to_signed();
    for (p, exp) in primes::factor(q.den())? {
        match classify_prime(spec, p)? {
            PrimeClass::DFactor => {}
            PrimeClass::Sequence(n) => {
                if exp > 1 {
                    return Ok(Membership::NotMember(NotMemberReason::ValuationTooNegative {
                        prime: p,
                    }));
                }
                let generator = spec.generator(n)?;
                // residue of q * d_n * p_n modulo p_n
                let scale = Rat::new(
                    spec.d(n)? * BigUint::from(p),
                    BigUint::one(),
                )
                .expect("positive");
                let c = (q * &scale).residue_mod(p);
                debug_assert!(c != 0, "pole at p_{n} forces a nonzero coefficient");
                coeffs.insert(n, c);
                residual = residual.sub(&(&generator * c).to_signed());
            }
        }
    }
    let Some(residual) = residual.to_rat() else {
        return Ok(Membership::NotMember(NotMemberReason::NegativeResidual));
    };
    match is_member_companion(&residual, spec)? {
        ThreeVal::True => Ok(Membership::Member(CanonicalDecomp { c0: residual, coeffs })),
        ThreeVal::False => Ok(Membership::NotMember(NotMemberReason::ResidualNotInN)),
        ThreeVal::Unknown { truncation } => Ok(Membership::Unknown { truncation }),
    }
}

/// Membership in `M`: a decomposition exists.
pub fn is_member(q: &Rat, spec: &GramsSpec) -> Result<ThreeVal, GramsError> {
    Ok(canonical_decompose(q, spec)?.three_val())
}

/// Divisibility `a | b` in `M`: the difference is a member. A negative
/// difference is immediately `False`.
pub fn divides(a: &Rat, b: &Rat, spec: &GramsSpec) -> Result<ThreeVal, GramsError> {
    match b.checked_sub(a) {
        None => Ok(ThreeVal::False),
        Some(diff) => is_member(&diff, spec),
    }
}

/// The decomposition-compatibility facts available whenever `q1 | q2`.
///
/// All five must hold for any true divisibility pair; a `false` entry is a
/// library bug surfaced for the tests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityConsistency {
    /// `c_0(q1)` divides `c_0(q2)` in the companion monoid.
    pub c0_divides: bool,
    /// `c_n(q2) = (c_n(q1) + c_n(q2 - q1)) mod p_n` for every index.
    pub coeff_congruence: bool,
    /// Equal `c_0`-parts force `c_0(q2 - q1) = 0`.
    pub equal_c0_zero_diff: bool,
    /// Equal `c_0`-parts keep every coefficient sum below its prime.
    pub equal_c0_sum_below_prime: bool,
    /// Equal `c_0`-parts make the coefficients monotone.
    pub equal_c0_monotone: bool,
}

impl DivisibilityConsistency {
    pub fn all_hold(&self) -> bool {
        self.c0_divides
            && self.coeff_congruence
            && self.equal_c0_zero_diff
            && self.equal_c0_sum_below_prime
            && self.equal_c0_monotone
    }
}

/// Evaluates the five decomposition-compatibility statements on a verified
/// divisibility pair `q1 | q2`.
pub fn divisibility_consistency(
    q1: &Rat,
    q2: &Rat,
    spec: &GramsSpec,
) -> Result<DivisibilityConsistency, GramsError> {
    let d1 = require_member(q1, spec)?;
    let d2 = require_member(q2, spec)?;
    let diff = q2
        .checked_sub(q1)
        .ok_or_else(|| GramsError::NotAMember { value: q2.clone() })?;
    let d3 = require_member(&diff, spec)?;

    let c0_diff = d2.c0.checked_sub(&d1.c0);
    let c0_divides = match c0_diff {
        None => false,
        Some(delta) => is_member_companion(&delta, spec)?.is_true(),
    };

    let mut indices: Vec<usize> = d1.coeffs.keys().copied().collect();
    indices.extend(d2.coeffs.keys().copied());
    indices.extend(d3.coeffs.keys().copied());
    indices.sort_unstable();
    indices.dedup();

    let mut coeff_congruence = true;
    let mut equal_c0_zero_diff = true;
    let mut equal_c0_sum_below_prime = true;
    let mut equal_c0_monotone = true;
    for &n in &indices {
        let p = spec.p(n)?;
        if d2.coeff(n) != (d1.coeff(n) + d3.coeff(n)) % p {
            coeff_congruence = false;
        }
        if d1.c0 == d2.c0 {
            if d1.coeff(n) + d3.coeff(n) >= p {
                equal_c0_sum_below_prime = false;
            }
            if d1.coeff(n) > d2.coeff(n) {
                equal_c0_monotone = false;
            }
        }
    }
    if d1.c0 == d2.c0 && !d3.c0.is_zero() {
        equal_c0_zero_diff = false;
    }

    Ok(DivisibilityConsistency {
        c0_divides,
        coeff_congruence,
        equal_c0_zero_diff,
        equal_c0_sum_below_prime,
        equal_c0_monotone,
    })
}

fn require_member(q: &Rat, spec: &GramsSpec) -> Result<CanonicalDecomp, GramsError> {
    match canonical_decompose(q, spec)? {
        Membership::Member(d) => Ok(d),
        _ => Err(GramsError::NotAMember { value: q.clone() }),
    }
}

/// Result of the constructive MCD search, with its verification data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McdOutcome {
    pub value: Rat,
    /// Largest coefficient index of the shifted input set (0 when the search
    /// short-circuited).
    pub fragment_index: usize,
    /// Atom indices swept in the maximality verification.
    pub atoms_checked: usize,
}

/// Computes a maximal common divisor of a finite member set.
///
/// Requires the companion monoid to be a valuation monoid. Shift by the
/// minimum `c_0`-part (in a valuation monoid the minimum-value element
/// divides the rest), then scan the fragment `F = <1/(d_i p_i) : i <= k>`
/// for its largest element dividing every shifted member. The returned value
/// is re-verified: it divides every input, and no atom up to index `k + 5`
/// extends it.
pub fn mcd(set: &[Rat], spec: &GramsSpec, node_cap: u64) -> Result<McdOutcome, GramsError> {
    assert!(!set.is_empty(), "MCD of an empty set");
    if !spec.n_is_valuation() {
        return Err(GramsError::NotValuation);
    }
    if set.len() == 1 {
        let _ = require_member(&set[0], spec)?;
        return Ok(McdOutcome { value: set[0].clone(), fragment_index: 0, atoms_checked: 0 });
    }
    let decomps: Vec<CanonicalDecomp> =
        set.iter().map(|s| require_member(s, spec)).collect::<Result<_, _>>()?;

    // Minimum c0-part by value; in a valuation companion monoid value order
    // and divisibility order agree.
    let c0_min = decomps.iter().map(|d| d.c0.clone()).min().expect("nonempty");
    let shifted: Vec<Rat> = set
        .iter()
        .map(|s| s.checked_sub(&c0_min).expect("c0 min divides every member"))
        .collect();

    if shifted.iter().any(|s| s.is_zero()) {
        return finish_mcd(set, c0_min, 0, spec);
    }
    let k = decomps.iter().filter_map(|d| d.max_index()).max();
    let Some(k) = k else {
        // Every member lies in the companion monoid; the shifted set then
        // contains zero, handled above. Reaching here means the minimum was
        // not attained, which the valuation hypothesis excludes.
        return Err(GramsError::InternalInvariant(
            "no coefficients but no zero shift".into(),
        ));
    };

    // Enumerate the fragment values below the smallest shifted member and
    // take the largest one dividing everything.
    let bound = shifted.iter().min().cloned().expect("nonempty");
    let mut candidates = fragment_values(spec, k, &bound, node_cap)?;
    candidates.sort_by(|a, b| b.cmp(a));
    let hit = exec::scan_first(&candidates, |f| -> Result<Option<()>, GramsError> {
        for s in &shifted {
            if !divides(f, s, spec)?.is_true() {
                return Ok(None);
            }
        }
        Ok(Some(()))
    })?;
    let m = match hit {
        Some((idx, ())) => candidates[idx].clone(),
        None => Rat::zero(),
    };
    finish_mcd(set, &c0_min + &m, k, spec)
}

fn finish_mcd(
    set: &[Rat],
    value: Rat,
    fragment_index: usize,
    spec: &GramsSpec,
) -> Result<McdOutcome, GramsError> {
    let atoms_checked = fragment_index + 5;
    verify_mcd(&value, set, atoms_checked, spec)?;
    Ok(McdOutcome { value, fragment_index, atoms_checked })
}

/// Verifies the MCD contract: `value` divides every member and no atom of
/// index up to `atom_limit` extends it to a larger common divisor.
fn verify_mcd(
    value: &Rat,
    set: &[Rat],
    atom_limit: usize,
    spec: &GramsSpec,
) -> Result<(), GramsError> {
    for s in set {
        if !divides(value, s, spec)?.is_true() {
            return Err(GramsError::InternalInvariant(format!(
                "claimed MCD {value} does not divide {s}"
            )));
        }
    }
    for i in 1..=atom_limit {
        let extended = value + &spec.generator(i)?;
        let mut common = true;
        for s in set {
            if !divides(&extended, s, spec)?.is_true() {
                common = false;
                break;
            }
        }
        if common {
            return Err(GramsError::InternalInvariant(format!(
                "claimed MCD {value} extends by atom {i}"
            )));
        }
    }
    Ok(())
}

/// Deduplicated values of the fragment `<1/(d_i p_i) : i <= k>` up to
/// `bound`, unsorted.
fn fragment_values(
    spec: &GramsSpec,
    k: usize,
    bound: &Rat,
    node_cap: u64,
) -> Result<Vec<Rat>, GramsError> {
    let gens: Vec<Rat> = (1..=k).map(|n| spec.generator(n)).collect::<Result<_, _>>()?;
    let mut budget = Budget::new(node_cap);
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(0usize, Rat::zero())];
    while let Some((pos, value)) = stack.pop() {
        budget.tick()?;
        seen.insert(value.clone());
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
    Ok(seen.into_iter().collect())
}

/// Trades a coefficient of a common divisor for a full companion step.
///
/// Hypotheses: `d` is a common divisor of `set`, every member has a zero
/// coefficient at `index`, and `d` has a positive one. Then
/// `d + (p_n - c_n(d))/(d_n p_n)` is again a common divisor; the output is
/// verified before being returned.
pub fn lift_common_divisor(
    d: &Rat,
    set: &[Rat],
    index: usize,
    spec: &GramsSpec,
) -> Result<Rat, LiftError> {
    let d_decomp = require_member(d, spec).map_err(LiftError::Grams)?;
    let c = d_decomp.coeff(index);
    if c == 0 {
        return Err(LiftError::DivisorCoefficientZero { index });
    }
    for s in set {
        match divides(d, s, spec).map_err(LiftError::Grams)? {
            ThreeVal::True => {}
            _ => return Err(LiftError::NotCommonDivisor { divisor: d.clone(), member: s.clone() }),
        }
        let s_decomp = require_member(s, spec).map_err(LiftError::Grams)?;
        if s_decomp.coeff(index) != 0 {
            return Err(LiftError::MemberCoefficientNonzero { member: s.clone(), index });
        }
    }
    let p = spec.p(index).map_err(|e| LiftError::Grams(e.into()))?;
    let step = &spec.generator(index).map_err(|e| LiftError::Grams(e.into()))? * (p - c);
    let lifted = d + &step;
    for s in set {
        if !divides(&lifted, s, spec).map_err(LiftError::Grams)?.is_true() {
            return Err(LiftError::Grams(GramsError::InternalInvariant(format!(
                "lift {lifted} fails to divide {s}"
            ))));
        }
    }
    Ok(lifted)
}

/// Hypothesis failures for [`lift_common_divisor`], named individually so
/// tests can assert which one was violated.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("{divisor} is not a common divisor: fails at {member}")]
    NotCommonDivisor { divisor: Rat, member: Rat },
    #[error("{member} has a nonzero coefficient at index {index}")]
    MemberCoefficientNonzero { member: Rat, index: usize },
    #[error("the divisor has a zero coefficient at index {index}")]
    DivisorCoefficientZero { index: usize },
    #[error(transparent)]
    Grams(GramsError),
}

/// Enumerates every MCD of `set` whose `c_0`-part is one of the candidates
/// (default: the minimum `c_0`-part, the unique MCD of the `c_0`-parts in a
/// valuation companion monoid).
///
/// MCD coefficients vanish beyond the largest index used by `set`, so for
/// each `c_0`-candidate the search space is the finite coefficient box
/// `prod_{i<=k} [0, p_i - 1]`, of size `prod_{i<=k} p_i`.
pub fn enumerate_mcds(
    set: &[Rat],
    spec: &GramsSpec,
    c0_candidates: Option<Vec<Rat>>,
    node_cap: u64,
) -> Result<Vec<Rat>, GramsError> {
    assert!(!set.is_empty(), "MCD enumeration over an empty set");
    if !spec.n_is_valuation() {
        return Err(GramsError::NotValuation);
    }
    let decomps: Vec<CanonicalDecomp> =
        set.iter().map(|s| require_member(s, spec)).collect::<Result<_, _>>()?;
    let k = decomps.iter().filter_map(|d| d.max_index()).max().unwrap_or(0);
    let candidates = match c0_candidates {
        Some(c) => c,
        None => vec![decomps.iter().map(|d| d.c0.clone()).min().expect("nonempty")],
    };

    let mut budget = Budget::new(node_cap);
    let mut out = Vec::new();
    for d0 in candidates {
        let mut boxes = vec![(d0.clone(), 0usize)];
        // Depth-first product over the coefficient box.
        while let Some((value, next_index)) = boxes.pop() {
            budget.tick()?;
            if next_index == k {
                out.push(value);
                continue;
            }
            let n = next_index + 1;
            let p = spec.p(n)?;
            let g = spec.generator(n)?;
            for c in 0..p {
                boxes.push((&value + &(&g * c), n));
            }
        }
    }
    out.sort();
    out.dedup();

    // Keep common divisors, then maximal ones.
    let common = exec::filter_collect(out, |d| {
        set.iter().all(|s| matches!(divides(d, s, spec), Ok(ThreeVal::True)))
    });
    let mut maximal = Vec::new();
    for d in &common {
        if is_mcd(d, set, spec)? {
            maximal.push(d.clone());
        }
    }
    Ok(maximal)
}

/// Exact maximality test for a common divisor `d` of `set`.
///
/// The shifted set's minimum `c_0`-part must be zero (otherwise it is itself
/// a nonzero common divisor), and then any nonzero common divisor would be
/// witnessed by an atom dividing the zero-`c_0` member, whose index is
/// bounded by that member's largest coefficient.
pub fn is_mcd(d: &Rat, set: &[Rat], spec: &GramsSpec) -> Result<bool, GramsError> {
    let mut shifted = Vec::with_capacity(set.len());
    for s in set {
        let Some(diff) = s.checked_sub(d) else { return Ok(false) };
        let decomp = match canonical_decompose(&diff, spec)? {
            Membership::Member(dd) => dd,
            Membership::NotMember(_) => return Ok(false),
            Membership::Unknown { truncation } => {
                return Err(GramsError::Inconclusive { truncation })
            }
        };
        shifted.push((diff, decomp));
    }
    let witness = shifted
        .iter()
        .min_by(|a, b| a.1.c0.cmp(&b.1.c0))
        .expect("nonempty");
    if !witness.1.c0.is_zero() {
        return Ok(false);
    }
    if witness.0.is_zero() {
        return Ok(true);
    }
    let k = witness.1.max_index().unwrap_or(0);
    for i in 1..=k {
        let atom = spec.generator(i)?;
        let mut common = true;
        for (diff, _) in &shifted {
            if !divides(&atom, diff, spec)?.is_true() {
                common = false;
                break;
            }
        }
        if common {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One strictly ascending link of the companion chain: `1/d_{n+1}` divides
/// `1/d_n` with a nonzero dyadic difference, so the principal ideals
/// `(1/d_n + M)` climb forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub index: usize,
    pub ideal_generator: Rat,
    pub successor: Rat,
    pub difference: Rat,
}

/// The `n`-th link of the non-stabilizing chain, verified exactly.
pub fn accp_chain_link(spec: &GramsSpec, n: usize) -> Result<ChainLink, GramsError> {
    if !spec.n_is_valuation() {
        return Err(GramsError::NotValuation);
    }
    let a = spec.companion_generator(n)?;
    let b = spec.companion_generator(n + 1)?;
    let difference = a
        .checked_sub(&b)
        .ok_or_else(|| GramsError::InternalInvariant("chain not descending".into()))?;
    if difference.is_zero() {
        return Err(GramsError::InternalInvariant("chain stabilized".into()));
    }
    if !divides(&b, &a, spec)?.is_true() {
        return Err(GramsError::InternalInvariant(format!("{b} does not divide {a}")));
    }
    Ok(ChainLink { index: n, ideal_generator: a, successor: b, difference })
}

/// Grams' classical monoid with all structural facts proven for every index.
pub fn classical(truncation: usize) -> GramsSpec {
    GramsSpec::classical(truncation)
}

/// True when the sequence rules make every membership answer definitive:
/// pow2 denominators with a named, index-complete prime rule.
pub fn answers_definitive(spec: &GramsSpec) -> bool {
    spec.is_pow2()
        && matches!(spec.p_rule(), PrimeIndexRule::NthPrime | PrimeIndexRule::NthOddPrime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::DEFAULT_NODE_CAP;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn grams4() -> GramsSpec {
        GramsSpec::classical(4)
    }

    #[test]
    fn decompose_examples() {
        let spec = grams4();
        let m = canonical_decompose(&r("13/30"), &spec).unwrap();
        let Membership::Member(d) = m else { panic!("{m:?}") };
        assert_eq!(d.c0, Rat::zero());
        assert_eq!(d.coeffs, BTreeMap::from([(1, 1), (2, 1)]));
        assert_eq!(d.value(&spec).unwrap(), r("13/30"));

        let zero = canonical_decompose(&Rat::zero(), &spec).unwrap();
        let Membership::Member(d) = zero else { panic!() };
        assert!(d.c0.is_zero() && d.coeffs.is_empty());

        let m = canonical_decompose(&r("7/30"), &spec).unwrap();
        assert_eq!(m, Membership::NotMember(NotMemberReason::NegativeResidual));
    }

    #[test]
    fn companion_membership_examples() {
        let spec = grams4();
        assert_eq!(is_member_companion(&r("3/4"), &spec).unwrap(), ThreeVal::True);
        assert_eq!(is_member_companion(&r("1/3"), &spec).unwrap(), ThreeVal::False);
        assert_eq!(is_member_companion(&Rat::zero(), &spec).unwrap(), ThreeVal::True);
    }

    #[test]
    fn membership_examples() {
        let spec = grams4();
        assert!(is_member(&r("1/2"), &spec).unwrap().is_true());
        assert!(is_member(&r("13/30"), &spec).unwrap().is_true());
        assert!(is_member(&r("7/30"), &spec).unwrap().is_false());
    }

    #[test]
    fn divides_examples() {
        let spec = grams4();
        assert!(divides(&r("1/10"), &r("13/30"), &spec).unwrap().is_true());
        assert!(divides(&r("1/4"), &r("1/3"), &spec).unwrap().is_false());
        assert!(divides(&r("13/30"), &r("13/30"), &spec).unwrap().is_true());
    }

    #[test]
    fn consistency_examples() {
        let spec = grams4();
        let report = divisibility_consistency(&r("1/10"), &r("13/30"), &spec).unwrap();
        assert!(report.all_hold(), "{report:?}");

        let report = divisibility_consistency(&Rat::zero(), &r("13/30"), &spec).unwrap();
        assert!(report.all_hold());

        // c0(1/2) = 1/2 divides c0(5/6) = 1/2 in the companion monoid.
        let report = divisibility_consistency(&r("1/2"), &r("5/6"), &spec).unwrap();
        assert!(report.all_hold());
        let d = require_member(&r("5/6"), &spec).unwrap();
        assert_eq!(d.c0, r("1/2"));
        assert_eq!(d.coeff(1), 1);
    }

    #[test]
    fn mcd_examples() {
        let spec = grams4();
        let cap = DEFAULT_NODE_CAP;
        assert_eq!(mcd(&[r("13/30"), r("23/30")], &spec, cap).unwrap().value, r("13/30"));
        assert_eq!(mcd(&[r("1/3"), r("1/10")], &spec, cap).unwrap().value, Rat::zero());
        assert_eq!(mcd(&[r("13/30")], &spec, cap).unwrap().value, r("13/30"));
        assert_eq!(mcd(&[r("1/2"), r("1/4")], &spec, cap).unwrap().value, r("1/4"));
    }

    #[test]
    fn lift_examples() {
        let spec = grams4();
        assert_eq!(
            lift_common_divisor(&r("1/10"), &[r("1/2")], 2, &spec).unwrap(),
            r("1/2")
        );
        assert_eq!(
            lift_common_divisor(&r("3/10"), &[r("1/2")], 2, &spec).unwrap(),
            r("1/2")
        );
        assert_eq!(
            lift_common_divisor(&r("1/3"), &[r("1/2")], 2, &spec),
            Err(LiftError::DivisorCoefficientZero { index: 2 })
        );
    }

    #[test]
    fn enumerate_mcds_examples() {
        let spec = grams4();
        let cap = DEFAULT_NODE_CAP;
        assert_eq!(
            enumerate_mcds(&[r("13/30"), r("23/30")], &spec, None, cap).unwrap(),
            vec![r("13/30")]
        );
        assert_eq!(
            enumerate_mcds(&[r("1/3"), r("1/10")], &spec, None, cap).unwrap(),
            vec![Rat::zero()]
        );
        assert_eq!(
            enumerate_mcds(&[r("1/2")], &spec, Some(vec![r("1/2")]), cap).unwrap(),
            vec![r("1/2")]
        );
    }

    #[test]
    fn chain_links_ascend() {
        let spec = GramsSpec::classical(25);
        for n in 1..=20 {
            let link = accp_chain_link(&spec, n).unwrap();
            assert_eq!(link.ideal_generator, Rat::new(1u32.into(), BigUint::one() << (n - 1)).unwrap());
            assert_eq!(link.difference, Rat::new(1u32.into(), BigUint::one() << n).unwrap());
        }
    }

    #[test]
    fn unclassifiable_prime_is_an_error() {
        let d = DenominatorRule::Explicit(vec![1u32.into(), 2u32.into()]);
        let p = PrimeIndexRule::Explicit(vec![3, 5]);
        let spec = crate::spec::MonoidSpec::grams_like(d, p, 2).unwrap();
        // 7 exceeds the prefix maximum: could appear later in the sequence.
        let err = canonical_decompose(&r("1/7"), &spec).unwrap_err();
        assert!(matches!(err, GramsError::UnclassifiablePrime { prime: 7, .. }));
    }
}

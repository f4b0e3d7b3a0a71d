//! Reductions, membership, and MCD search for 2-prime reciprocal monoids.
//!
//! A 2-prime reciprocal monoid `M = <1/(p_n p_{n+2})>` is built from a
//! strictly increasing prime sequence. Every member can be written as
//!
//! ```text
//!   q = c + sum_{j=1}^{n} c_j / (p_{j-2} p_j),       p_{-1} = p_0 = 1,
//! ```
//!
//! where `n` is the largest index with `v_{p_n}(q) < 0`: the slot at index
//! `j` is worth `c_j/(p_{j-2} p_j)`, slots 1 and 2 degenerate to `c_1/p_1`
//! and `c_2/p_2`, and every slot value is itself a member (`1/p_j` is
//! `p_{j+2}` copies of an atom, and `1 = p_1 p_3 * atom_1`). The reduced
//! form exists but is not canonical; nothing here assumes uniqueness.
//!
//! Membership is decided by a pruned DFS over slot coefficients from the top
//! index down: at each slot the coefficient's residue class is forced by the
//! running residual's valuation, and the final two slots plus the integer
//! part are solved in closed form.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::budget::{Budget, Exhausted};
use crate::exec;
use crate::oracle::Factorization;
use crate::primes::{self};
use crate::rat::{mod_inverse, Rat};
use crate::spec::{SpecError, TwoPrimeSpec};
use crate::ThreeVal;

/// A reduced expression `c + sum c_j/(p_{j-2} p_j)` with slot indices at
/// most the valuation bound of the value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedForm {
    pub c: BigUint,
    pub coeffs: BTreeMap<usize, BigUint>,
}

impl ReducedForm {
    /// Reconstructs the value exactly.
    pub fn value(&self, spec: &TwoPrimeSpec) -> Result<Rat, TwoPrimeError> {
        let mut acc = Rat::new(self.c.clone(), BigUint::one()).expect("integer");
        for (&j, c) in &self.coeffs {
            let den = slot_denominator(spec, j)?;
            acc += &Rat::new(c.clone(), den).expect("positive denominator");
        }
        Ok(acc)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }
}

/// `p_{j-2} * p_j` with the convention `p_{-1} = p_0 = 1`.
fn slot_denominator(spec: &TwoPrimeSpec, j: usize) -> Result<BigUint, TwoPrimeError> {
    assert!(j >= 1, "slot indices are 1-based");
    let high = BigUint::from(spec.p(j)?);
    Ok(if j <= 2 {
        high
    } else {
        high * BigUint::from(spec.p(j - 2)?)
    })
}

/// Errors from 2-prime reciprocal operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TwoPrimeError {
    #[error("prime {prime} in the denominator cannot be classified at truncation {truncation}")]
    UnclassifiablePrime { prime: u64, truncation: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Factor(#[from] primes::FactorError),
    #[error("search budget exhausted after {nodes} nodes")]
    Overflow { nodes: u64 },
    #[error("{value} is not a member (or membership is unknown)")]
    NotAMember { value: Rat },
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

impl From<Exhausted> for TwoPrimeError {
    fn from(e: Exhausted) -> Self {
        TwoPrimeError::Overflow { nodes: e.cap }
    }
}

/// Rewrites an atomic factorization into a reduced form by carrying top
/// slots downward.
///
/// The atom at index `i` occupies slot `j = i + 2`. While the top slot index
/// exceeds the valuation bound of the value, its coefficient is divisible by
/// its top prime (no other slot carries that prime), so it folds two slots
/// down: `c_j/(p_{j-2} p_j) = (p_{j-4} c_j / p_j) / (p_{j-4} p_{j-2})`.
/// Slots 1 and 2 finally shed their integer parts into `c`. Total on valid
/// input; value-preserving by construction.
pub fn reduce_decomposition(
    f: &Factorization,
    spec: &TwoPrimeSpec,
) -> Result<ReducedForm, TwoPrimeError> {
    let mut slots: BTreeMap<usize, BigUint> = BTreeMap::new();
    for (&atom_index, &mult) in f.terms() {
        *slots.entry(atom_index + 2).or_insert_with(BigUint::zero) += BigUint::from(mult);
    }
    // Valuation bound of the total value.
    let gens: Vec<Rat> = {
        let max_atom = f.terms().keys().next_back().copied().unwrap_or(0);
        (1..=max_atom)
            .map(|n| spec.generator(n))
            .collect::<Result<_, _>>()?
    };
    let value = f.value(&gens);
    let n_bound = valuation_bound(&value, spec)?;

    // Fold the top slot downward while it exceeds the valuation bound. Up
    // there the slot is the sole carrier of its top prime, so the prime
    // divides the coefficient and c_j/(p_{j-2} p_j) rewrites as
    // (p_{j-4} c_j / p_j) / (p_{j-4} p_{j-2}).
    let mut c = BigUint::zero();
    loop {
        let Some((&j, _)) = slots.iter().next_back() else { break };
        if j <= n_bound {
            break;
        }
        let cj = slots.remove(&j).expect("present");
        if cj.is_zero() {
            continue;
        }
        let p_j = BigUint::from(spec.p(j)?);
        let (quot, rem) = cj.div_rem(&p_j);
        if !rem.is_zero() {
            return Err(TwoPrimeError::InternalInvariant(format!(
                "slot {j} coefficient {cj} not divisible by its top prime"
            )));
        }
        if j <= 2 {
            c += quot;
        } else {
            let factor = if j >= 5 {
                BigUint::from(spec.p(j - 4)?)
            } else {
                BigUint::one()
            };
            *slots.entry(j - 2).or_insert_with(BigUint::zero) += quot * factor;
        }
    }

    // The two degenerate slots shed their integer parts.
    for j in [1usize, 2] {
        if let Some(cj) = slots.remove(&j) {
            let p_j = BigUint::from(spec.p(j)?);
            let (quot, rem) = cj.div_rem(&p_j);
            c += quot;
            if !rem.is_zero() {
                slots.insert(j, rem);
            }
        }
    }
    slots.retain(|_, v| !v.is_zero());
    let coeffs = slots;
    let form = ReducedForm { c, coeffs };
    debug_assert_eq!(form.value(spec)?, value, "carries must preserve the value");
    if let Some(max) = form.max_index() {
        if max > n_bound {
            return Err(TwoPrimeError::InternalInvariant(format!(
                "reduced form keeps slot {max} above the valuation bound {n_bound}"
            )));
        }
    }
    Ok(form)
}

/// Largest sequence index whose prime has a pole in `q` (0 when none).
fn valuation_bound(q: &Rat, spec: &TwoPrimeSpec) -> Result<usize, TwoPrimeError> {
    let mut bound = 0usize;
    for (p, _) in primes::factor(q.den())? {
        match spec.p_rule().index_of(p) {
            Ok(Some(idx)) => bound = bound.max(idx),
            Ok(None) => {
                return Err(TwoPrimeError::InternalInvariant(format!(
                    "denominator prime {p} outside the sequence"
                )))
            }
            Err(primes::RuleError::TruncationExceeded { .. }) => {
                return Err(TwoPrimeError::UnclassifiablePrime {
                    prime: p,
                    truncation: spec.truncation(),
                })
            }
            Err(e) => return Err(TwoPrimeError::Spec(SpecError::Rule(e))),
        }
    }
    Ok(bound)
}

/// Classifies every denominator prime of `q`; `Ok(None)` means some prime is
/// provably outside the sequence, so `q` is definitively not a member.
fn classify_denominator(
    q: &Rat,
    spec: &TwoPrimeSpec,
) -> Result<Option<Vec<(u64, usize, u32)>>, TwoPrimeError> {
    let mut out = Vec::new();
    for (p, exp) in primes::factor(q.den())? {
        match spec.p_rule().index_of(p) {
            Ok(Some(idx)) => out.push((p, idx, exp)),
            Ok(None) => return Ok(None),
            Err(primes::RuleError::TruncationExceeded { .. }) => {
                return Err(TwoPrimeError::UnclassifiablePrime {
                    prime: p,
                    truncation: spec.truncation(),
                })
            }
            Err(e) => return Err(TwoPrimeError::Spec(SpecError::Rule(e))),
        }
    }
    Ok(Some(out))
}

/// Membership decision with a witness: a reduced form summing to `q` when
/// one exists.
pub fn member_witness(
    q: &Rat,
    spec: &TwoPrimeSpec,
    node_cap: u64,
) -> Result<MembershipWitness, TwoPrimeError> {
    if q.is_integer() {
        // Integers are members: 1 = p_1 p_3 * atom_1.
        return Ok(MembershipWitness::Member(ReducedForm {
            c: q.num().clone(),
            coeffs: BTreeMap::new(),
        }));
    }
    let Some(classified) = classify_denominator(q, spec)? else {
        return Ok(MembershipWitness::NotMember);
    };
    // Poles deeper than one are unreachable: each prime appears to the first
    // power in at most two slot denominators sharing it once each.
    if classified.iter().any(|&(_, _, exp)| exp > 1) {
        return Ok(MembershipWitness::NotMember);
    }
    let n_bound = classified.iter().map(|&(_, idx, _)| idx).max().unwrap_or(0);
    let mut budget = Budget::new(node_cap);
    let mut coeffs = BTreeMap::new();
    match search_slots(q.clone(), n_bound, spec, &mut coeffs, &mut budget) {
        Ok(Some(form)) => Ok(MembershipWitness::Member(form)),
        Ok(None) => Ok(MembershipWitness::NotMember),
        Err(Exhausted { cap }) => Ok(MembershipWitness::Unknown { nodes: cap }),
    }
}

/// Membership outcome with its witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MembershipWitness {
    Member(ReducedForm),
    NotMember,
    /// The search hit its node cap before deciding.
    Unknown { nodes: u64 },
}

impl MembershipWitness {
    pub fn three_val(&self, truncation: usize) -> ThreeVal {
        match self {
            MembershipWitness::Member(_) => ThreeVal::True,
            MembershipWitness::NotMember => ThreeVal::False,
            MembershipWitness::Unknown { .. } => ThreeVal::Unknown { truncation },
        }
    }
}

/// DFS over slots from `j` down to 3; slots 1, 2 and the integer part are
/// solved directly at the leaf.
fn search_slots(
    residual: Rat,
    j: usize,
    spec: &TwoPrimeSpec,
    coeffs: &mut BTreeMap<usize, BigUint>,
    budget: &mut Budget,
) -> Result<Option<ReducedForm>, Exhausted> {
    budget.tick()?;
    if j < 3 {
        return Ok(solve_leaf(&residual, spec, coeffs));
    }
    let p_j = spec.p(j).expect("indices classified upstream");
    let den = slot_denominator(spec, j).expect("indices classified upstream");
    let slot = Rat::new(BigUint::one(), den.clone()).expect("positive");
    // Residue class of c_j forced by v_{p_j}(residual): c_j = residual * den
    // (mod p_j), the unique class clearing the pole.
    let forced = if crate::rat::valuation_uint(residual.den(), p_j) > 0 {
        (&residual * &Rat::new(den, BigUint::one()).unwrap()).residue_mod(p_j)
    } else {
        0
    };
    let mut c = BigUint::from(forced);
    let step = BigUint::from(p_j);
    loop {
        let contribution = &slot * &Rat::new(c.clone(), BigUint::one()).unwrap();
        let Some(next) = residual.checked_sub(&contribution) else {
            return Ok(None);
        };
        if let Some(found) = search_slots(next, j - 1, spec, coeffs, budget)? {
            let mut form = found;
            if !c.is_zero() {
                form.coeffs.insert(j, c);
            }
            return Ok(Some(form));
        }
        c += &step;
    }
}

/// Solves `residual = c + c_1/p_1 + c_2/p_2` in nonnegative integers.
///
/// Writing `residual = x/(p_1 p_2)`, the residues of `c_1` and `c_2` are
/// forced modulo `p_1` and `p_2`; minimal residues leave the largest integer
/// part, so a solution exists iff that part is nonnegative.
fn solve_leaf(
    residual: &Rat,
    spec: &TwoPrimeSpec,
    upper: &BTreeMap<usize, BigUint>,
) -> Option<ReducedForm> {
    let p1 = spec.p(1).expect("first indices always classified");
    let p2 = spec.p(2).expect("first indices always classified");
    let den = BigUint::from(p1) * BigUint::from(p2);
    if !(&den % residual.den()).is_zero() {
        return None;
    }
    let x = residual.num() * (&den / residual.den());
    let x_mod_p1 = crate::rat::big_mod(&x, p1);
    let x_mod_p2 = crate::rat::big_mod(&x, p2);
    let c1 = x_mod_p1 * mod_inverse(p2 % p1, p1) % p1;
    let c2 = x_mod_p2 * mod_inverse(p1 % p2, p2) % p2;
    let consumed = BigUint::from(c1) * BigUint::from(p2) + BigUint::from(c2) * BigUint::from(p1);
    if consumed > x {
        return None;
    }
    let c = (x - consumed) / den;
    let mut coeffs = upper.clone();
    if c1 > 0 {
        coeffs.insert(1, BigUint::from(c1));
    }
    if c2 > 0 {
        coeffs.insert(2, BigUint::from(c2));
    }
    Some(ReducedForm { c, coeffs })
}

/// Membership in `M`.
pub fn is_member(q: &Rat, spec: &TwoPrimeSpec, node_cap: u64) -> Result<ThreeVal, TwoPrimeError> {
    Ok(member_witness(q, spec, node_cap)?.three_val(spec.truncation()))
}

/// Divisibility `a | b` in `M`.
pub fn divides(
    a: &Rat,
    b: &Rat,
    spec: &TwoPrimeSpec,
    node_cap: u64,
) -> Result<ThreeVal, TwoPrimeError> {
    match b.checked_sub(a) {
        None => Ok(ThreeVal::False),
        Some(diff) => is_member(&diff, spec, node_cap),
    }
}

/// Result of the bounded MCD search with its verification data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McdOutcome {
    pub value: Rat,
    /// Largest slot index admitted in the candidate forms.
    pub slot_bound: usize,
    /// Atom indices swept in the maximality verification.
    pub atoms_checked: usize,
}

/// Computes a maximal common divisor of a finite member set.
///
/// Integer-only sets return their minimum (the shifted set then contains
/// zero). Otherwise every common divisor is reachable as a reduced form
/// whose slot indices stay within headroom of the largest denominator prime
/// of the set; candidates of that bounded shape below `min(set)` are scanned
/// by decreasing value and the first verified survivor is returned, then
/// re-verified: it divides every member, and no atom within the headroom
/// extends it.
pub fn mcd(set: &[Rat], spec: &TwoPrimeSpec, node_cap: u64) -> Result<McdOutcome, TwoPrimeError> {
    assert!(!set.is_empty(), "MCD of an empty set");
    for s in set {
        if !is_member(s, spec, node_cap)?.is_true() {
            return Err(TwoPrimeError::NotAMember { value: s.clone() });
        }
    }
    if set.len() == 1 {
        return Ok(McdOutcome { value: set[0].clone(), slot_bound: 0, atoms_checked: 0 });
    }
    if set.iter().all(|s| s.is_integer()) {
        let min = set.iter().min().cloned().expect("nonempty");
        let slot_bound = 0;
        verify_mcd(&min, set, slot_bound + 5, spec, node_cap)?;
        return Ok(McdOutcome { value: min, slot_bound, atoms_checked: slot_bound + 5 });
    }

    let mut max_idx = 0usize;
    for s in set {
        max_idx = max_idx.max(valuation_bound(s, spec)?);
    }
    // Headroom: divisors may carry poles a little past the set's own primes;
    // five extra indices match the contradiction argument's requirements and
    // the maximality sweep re-verifies the answer independently.
    let slot_bound = max_idx + 5;
    let min = set.iter().min().cloned().expect("nonempty");

    let mut candidates = bounded_forms(&min, slot_bound, spec, node_cap)?;
    candidates.sort_by(|a, b| b.cmp(a));
    let hit = exec::scan_first(&candidates, |d| -> Result<Option<()>, TwoPrimeError> {
        for s in set {
            match divides(d, s, spec, node_cap)? {
                ThreeVal::True => {}
                ThreeVal::False => return Ok(None),
                ThreeVal::Unknown { .. } => {
                    return Err(TwoPrimeError::Overflow { nodes: node_cap })
                }
            }
        }
        Ok(Some(()))
    })?;
    let value = match hit {
        Some((idx, ())) => candidates[idx].clone(),
        None => Rat::zero(),
    };
    verify_mcd(&value, set, slot_bound + 5, spec, node_cap)?;
    Ok(McdOutcome { value, slot_bound, atoms_checked: slot_bound + 5 })
}

/// All values `d0 + sum_{j<=bound} c_j/(p_{j-2} p_j) <= limit`, deduplicated.
fn bounded_forms(
    limit: &Rat,
    slot_bound: usize,
    spec: &TwoPrimeSpec,
    node_cap: u64,
) -> Result<Vec<Rat>, TwoPrimeError> {
    let mut slots = Vec::with_capacity(slot_bound);
    for j in 1..=slot_bound {
        slots.push(Rat::new(BigUint::one(), slot_denominator(spec, j)?).expect("positive"));
    }
    // The integer part is slot value 1.
    slots.push(Rat::one());
    let mut budget = Budget::new(node_cap);
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(0usize, Rat::zero())];
    while let Some((pos, value)) = stack.pop() {
        budget.tick()?;
        seen.insert(value.clone());
        if pos == slots.len() {
            continue;
        }
        stack.push((pos + 1, value.clone()));
        let mut current = value;
        loop {
            current += &slots[pos];
            if &current > limit {
                break;
            }
            stack.push((pos + 1, current.clone()));
        }
    }
    Ok(seen.into_iter().collect())
}

/// Verifies the MCD contract: divides every member, and no atom of index up
/// to `atom_limit` extends it.
fn verify_mcd(
    value: &Rat,
    set: &[Rat],
    atom_limit: usize,
    spec: &TwoPrimeSpec,
    node_cap: u64,
) -> Result<(), TwoPrimeError> {
    for s in set {
        if !divides(value, s, spec, node_cap)?.is_true() {
            return Err(TwoPrimeError::InternalInvariant(format!(
                "claimed MCD {value} does not divide {s}"
            )));
        }
    }
    for i in 1..=atom_limit {
        let extended = value + &spec.generator(i)?;
        let mut common = true;
        for s in set {
            if !divides(&extended, s, spec, node_cap)?.is_true() {
                common = false;
                break;
            }
        }
        if common {
            return Err(TwoPrimeError::InternalInvariant(format!(
                "claimed MCD {value} extends by atom {i}"
            )));
        }
    }
    Ok(())
}

/// One strictly ascending link of a principal-ideal chain: `1/p_{idx+2}`
/// divides `1/p_idx` and the difference is a positive multiple of one atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    /// Sequence index of the link's ideal generator.
    pub index: usize,
    pub ideal_generator: Rat,
    pub successor: Rat,
    /// Number of copies of `atom_index` making up the difference.
    pub multiplicity: u64,
    pub atom_index: usize,
    pub atom: Rat,
}

/// Parity of the chain: generators `1/p_{2n-1}` or `1/p_{2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainParity {
    Odd,
    Even,
}

/// The `n`-th link of the chosen chain: `1/p_idx = 1/p_{idx+2} +
/// (p_{idx+2} - p_idx) * 1/(p_idx p_{idx+2})`, verified exactly.
pub fn chain_witness(
    spec: &TwoPrimeSpec,
    parity: ChainParity,
    n: usize,
) -> Result<ChainLink, TwoPrimeError> {
    assert!(n >= 1, "chain links are 1-based");
    let index = match parity {
        ChainParity::Odd => 2 * n - 1,
        ChainParity::Even => 2 * n,
    };
    let p_low = spec.p(index)?;
    let p_high = spec.p(index + 2)?;
    let ideal_generator = Rat::new(BigUint::one(), BigUint::from(p_low)).unwrap();
    let successor = Rat::new(BigUint::one(), BigUint::from(p_high)).unwrap();
    let atom = spec.generator(index)?;
    let multiplicity = p_high - p_low;
    let difference = ideal_generator
        .checked_sub(&successor)
        .ok_or_else(|| TwoPrimeError::InternalInvariant("chain not descending".into()))?;
    if difference != &atom * multiplicity || multiplicity == 0 {
        return Err(TwoPrimeError::InternalInvariant(format!(
            "link {index}: difference is not {multiplicity} copies of the atom"
        )));
    }
    Ok(ChainLink {
        index,
        ideal_generator,
        successor,
        multiplicity,
        atom_index: index,
        atom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::DEFAULT_NODE_CAP;
    use crate::spec::TwoPrimeSpec;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn mp(k: usize) -> TwoPrimeSpec {
        TwoPrimeSpec::over_all_primes(k)
    }

    fn fact(pairs: &[(usize, u64)]) -> Factorization {
        Factorization::new(pairs.iter().copied().collect())
    }

    #[test]
    fn reduce_examples() {
        let spec = mp(6);
        // 5 copies of atom 1 (value 1/2): carries to slot 1.
        let form = reduce_decomposition(&fact(&[(1, 5)]), &spec).unwrap();
        assert_eq!(form.c, BigUint::zero());
        assert_eq!(form.coeffs, BTreeMap::from([(1, BigUint::one())]));

        // 21 copies of atom 2 (value 1): carries all the way to the integer.
        let form = reduce_decomposition(&fact(&[(2, 21)]), &spec).unwrap();
        assert_eq!(form.c, BigUint::one());
        assert!(form.coeffs.is_empty());

        // A single atom is already reduced.
        let form = reduce_decomposition(&fact(&[(1, 1)]), &spec).unwrap();
        assert_eq!(form.c, BigUint::zero());
        assert_eq!(form.coeffs, BTreeMap::from([(3, BigUint::one())]));
    }

    #[test]
    fn membership_examples() {
        let spec = mp(6);
        let cap = DEFAULT_NODE_CAP;
        assert!(is_member(&r("1/2"), &spec, cap).unwrap().is_true());
        assert!(is_member(&r("1/6"), &spec, cap).unwrap().is_false());
        assert!(is_member(&Rat::zero(), &spec, cap).unwrap().is_true());
        assert!(is_member(&r("7"), &spec, cap).unwrap().is_true());
        assert!(is_member(&r("1/10"), &spec, cap).unwrap().is_true());
        assert!(is_member(&r("54/55"), &spec, cap).unwrap().is_true());
    }

    #[test]
    fn member_witness_reconstructs() {
        let spec = mp(6);
        for q in ["1/2", "7/10", "54/55", "13/21", "3"] {
            match member_witness(&r(q), &spec, DEFAULT_NODE_CAP).unwrap() {
                MembershipWitness::Member(form) => {
                    assert_eq!(form.value(&spec).unwrap(), r(q), "witness for {q}");
                }
                other => panic!("{q} should be a member, got {other:?}"),
            }
        }
    }

    #[test]
    fn mcd_examples() {
        let spec = mp(6);
        let cap = DEFAULT_NODE_CAP;
        assert_eq!(mcd(&[r("1/10"), r("1/21")], &spec, cap).unwrap().value, Rat::zero());
        assert_eq!(mcd(&[r("1/2"), r("7/10")], &spec, cap).unwrap().value, r("1/2"));
        assert_eq!(mcd(&[r("2"), r("3")], &spec, cap).unwrap().value, r("2"));
        assert_eq!(mcd(&[r("7/10")], &spec, cap).unwrap().value, r("7/10"));
    }

    #[test]
    fn chain_witness_examples() {
        let spec = mp(12);
        let link = chain_witness(&spec, ChainParity::Odd, 1).unwrap();
        assert_eq!(link.ideal_generator, r("1/2"));
        assert_eq!(link.successor, r("1/5"));
        assert_eq!(link.multiplicity, 3);
        assert_eq!(link.atom, r("1/10"));

        let link = chain_witness(&spec, ChainParity::Even, 1).unwrap();
        assert_eq!(link.ideal_generator, r("1/3"));
        assert_eq!(link.successor, r("1/7"));
        assert_eq!(link.multiplicity, 4);
        assert_eq!(link.atom, r("1/21"));

        let link = chain_witness(&spec, ChainParity::Odd, 2).unwrap();
        assert_eq!(link.ideal_generator, r("1/5"));
        assert_eq!(link.successor, r("1/11"));
        assert_eq!(link.multiplicity, 6);
        assert_eq!(link.atom, r("1/55"));
    }

    #[test]
    fn non_member_prime_outside_sequence() {
        // Sequence 3, 5, 7, ...: denominators with a factor of 2 are
        // provably outside.
        let spec = crate::spec::MonoidSpec::two_prime(
            crate::primes::PrimeIndexRule::NthOddPrime,
            4,
        )
        .unwrap();
        assert!(is_member(&r("1/2"), &spec, DEFAULT_NODE_CAP).unwrap().is_false());
    }
}

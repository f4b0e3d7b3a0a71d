//! MCD by descent in ACCP monoids, and the staged construction of a set
//! with no maximal common divisor in a monoid where chains of principal
//! ideals climb forever.
//!
//! In a finitely generated monoid every ascending chain of principal ideals
//! stabilizes, so repeatedly stripping a nonzero common divisor terminates
//! and the accumulated total is an MCD; [`mcd_descent`] runs that loop on
//! top of the brute-force oracle.
//!
//! In a Grams-like monoid with pow2 denominators the companion chain
//! `a_k = 1/2^(k-1)` never stabilizes, and [`build_no_mcd_set`] executes the
//! staged diagonalization that defeats every candidate divisor: enumerate
//! the monoid, and at stage `i` either record that candidate `c_i` extends
//! by the next chain difference (so it is not maximal) or jump the stage
//! index past a witnessed non-divisibility. The stage test quantifies over
//! every chain index; for the pow2 chain it is decided *exactly* by
//! [`divides_all_tail`], and for other chains an honest bounded mode is
//! reported as such.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::budget::DEFAULT_NODE_CAP;
use crate::grams::{self, GramsError};
use crate::oracle::{Oracle, OracleError};
use crate::rat::Rat;
use crate::spec::{FinGenSpec, GramsSpec, MonoidSpec};
use crate::ThreeVal;

/// Errors from this module's operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainsError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Grams(#[from] GramsError),
    #[error("candidate enumeration ran dry after {available} elements, {requested} stages requested")]
    EnumerationTooShort { available: usize, requested: usize },
    #[error("the chain construction requires the pow2 denominator rule or bounded mode")]
    UnsupportedChain,
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

/// Result of the descent: the accumulated MCD and each stripped divisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescentOutcome {
    pub value: Rat,
    pub steps: Vec<Rat>,
}

/// MCD of a member set in a finitely generated monoid by divisor descent.
///
/// Strips the largest nonzero common divisor each round (any choice works;
/// the largest is fixed for reproducibility) until only zero remains. The
/// loop terminates because each strip lowers the minimum element by at
/// least the smallest generator.
pub fn mcd_descent(
    set: &[Rat],
    spec: &FinGenSpec,
    node_cap: u64,
) -> Result<DescentOutcome, ChainsError> {
    assert!(!set.is_empty(), "descent over an empty set");
    let oracle = Oracle::new(spec.generators().to_vec(), node_cap)?;
    let mut shifted: Vec<Rat> = set.to_vec();
    let mut total = Rat::zero();
    let mut steps = Vec::new();
    loop {
        let divisors = oracle.common_divisors(&shifted)?;
        let Some(best) = divisors.into_iter().filter(|d| !d.is_zero()).max() else {
            return Ok(DescentOutcome { value: total, steps });
        };
        total += &best;
        for s in &mut shifted {
            *s = s.checked_sub(&best).expect("common divisor");
        }
        steps.push(best);
    }
}

/// Elements of a spec's truncation with value at most `bound`, ascending
/// from zero.
pub fn enumerate_elements(
    spec: &MonoidSpec,
    bound: &Rat,
    k: usize,
    node_cap: u64,
) -> Result<Vec<Rat>, ChainsError> {
    let gens = match spec.generators(k).map_err(GramsError::Spec)? {
        crate::spec::GeneratorSet::Rank1(g) => g,
        crate::spec::GeneratorSet::Rank2(_) => {
            return Err(ChainsError::InternalInvariant(
                "element enumeration is rank-1 only".into(),
            ))
        }
    };
    let oracle = Oracle::new(gens, node_cap)?;
    Ok(oracle.enumerate_values(bound)?)
}

/// Proof strength of a tail decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProofMode {
    /// Decided exactly for every chain index.
    ExactTail,
    /// Checked for chain indices up to the bound only.
    Bounded { k_max: usize },
}

/// Decision of "`c` divides `base + 1/d_k` for every `k >= 1`".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailDecision {
    pub divides_all: bool,
    pub mode: ProofMode,
    /// For a negative decision, the least chain index where divisibility
    /// fails (exact mode) or a witnessed failure (bounded mode).
    pub failing_index: Option<usize>,
}

/// Default bound for the non-pow2 fallback mode.
pub const DEFAULT_TAIL_BOUND: usize = 64;

/// Decides whether `c` divides every element `base + 1/2^(k-1)` of the
/// dyadic chain, exactly.
///
/// The forced coefficients of `base + 1/2^(k-1) - c` do not depend on `k`
/// (powers of two are units modulo every sequence prime), so the membership
/// of the difference reduces to comparing `base + 1/2^(k-1)` against the
/// *clearing level* of `c`: its `c_0`-part plus one full companion step for
/// each nonzero coefficient. The infimum over `k` is `base` itself, giving
/// the exact rule `divides-all iff base >= clearing_level(c)`.
///
/// Non-pow2 specs fall back to checking chain indices up to `k_max`; the
/// decision is then reported in bounded mode (a negative answer is still
/// exact, carrying its witness index).
pub fn divides_all_tail(
    c: &Rat,
    base: &Rat,
    spec: &GramsSpec,
    k_max: usize,
) -> Result<TailDecision, ChainsError> {
    if !spec.is_pow2() {
        for k in 1..=k_max {
            let element = base + &spec.companion_generator(k).map_err(GramsError::Spec)?;
            match grams::divides(c, &element, spec)? {
                ThreeVal::True => {}
                _ => {
                    return Ok(TailDecision {
                        divides_all: false,
                        mode: ProofMode::Bounded { k_max },
                        failing_index: Some(k),
                    })
                }
            }
        }
        return Ok(TailDecision {
            divides_all: true,
            mode: ProofMode::Bounded { k_max },
            failing_index: None,
        });
    }

    if c.is_zero() {
        return Ok(TailDecision {
            divides_all: true,
            mode: ProofMode::ExactTail,
            failing_index: None,
        });
    }
    let level = clearing_level(c, spec)?;
    if base >= &level {
        Ok(TailDecision { divides_all: true, mode: ProofMode::ExactTail, failing_index: None })
    } else {
        // Least k with base + 1/2^(k-1) < level, i.e. 2^(1-k) < level - base.
        let gap = level.checked_sub(base).expect("level > base");
        let mut k = 1usize;
        loop {
            let step = Rat::new(BigUint::one(), BigUint::one() << (k - 1)).unwrap();
            if step < gap {
                break;
            }
            k += 1;
        }
        Ok(TailDecision {
            divides_all: false,
            mode: ProofMode::ExactTail,
            failing_index: Some(k),
        })
    }
}

/// The least dyadic value `b` such that `c` divides `b + t` for every
/// dyadic `t >= 0`: the `c_0`-part plus `1/d_n` for every nonzero
/// coefficient (subtracting `c` from a dyadic forces coefficient
/// `p_n - c_n(c)` at each such index, which costs the complementary part of
/// a companion step).
fn clearing_level(c: &Rat, spec: &GramsSpec) -> Result<Rat, ChainsError> {
    let decomp = match grams::canonical_decompose(c, spec)? {
        grams::Membership::Member(d) => d,
        other => {
            return Err(ChainsError::InternalInvariant(format!(
                "tail test on a non-member: {other:?}"
            )))
        }
    };
    let mut level = decomp.c0.clone();
    for &n in decomp.coeffs.keys() {
        level += &spec.companion_generator(n).map_err(GramsError::Spec)?;
    }
    Ok(level)
}

/// Why a stage excluded its candidate from being an MCD of the final set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExclusionCertificate {
    /// The candidate divides the whole tail, so candidate + next chain
    /// difference is a strictly larger common divisor.
    ExtensionWitness { witness: Rat, mode: ProofMode, verified: bool },
    /// The candidate fails to divide a concrete element of the set.
    NonDivisorWitness { element: Rat, verified: bool },
}

impl ExclusionCertificate {
    pub fn verified(&self) -> bool {
        match self {
            ExclusionCertificate::ExtensionWitness { verified, .. } => *verified,
            ExclusionCertificate::NonDivisorWitness { verified, .. } => *verified,
        }
    }

    pub fn mode(&self) -> ProofMode {
        match self {
            ExclusionCertificate::ExtensionWitness { mode, .. } => *mode,
            // A concrete non-divisor is exact evidence regardless of how the
            // stage test was decided.
            ExclusionCertificate::NonDivisorWitness { .. } => ProofMode::ExactTail,
        }
    }
}

/// Which branch a stage took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageBranch {
    DividesAll,
    FailsAt { index: usize },
}

/// One stage of the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub index: usize,
    pub candidate: Rat,
    pub branch: StageBranch,
    pub certificate: ExclusionCertificate,
    pub chosen_indices: Vec<usize>,
    pub level: usize,
}

/// The staged construction: chain data, the enumeration used, and every
/// stage with its machine-verified exclusion certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoMcdConstruction {
    /// Chain elements `a_k = 1/d_k` actually referenced by the stages.
    pub chain: Vec<Rat>,
    /// Differences `b_k = a_k - a_{k+1}`, all nonzero.
    pub differences: Vec<Rat>,
    pub enumeration: Vec<Rat>,
    pub stages: Vec<Stage>,
}

impl NoMcdConstruction {
    /// Elements `e_k = sum_{j in S, j < k} b_j + a_k` of the target set for
    /// `k` up to `limit`.
    pub fn set_elements(&self, spec: &GramsSpec, limit: usize) -> Result<Vec<Rat>, ChainsError> {
        let chosen: Vec<usize> = self
            .stages
            .last()
            .map(|s| s.chosen_indices.clone())
            .unwrap_or_default();
        let mut out = Vec::with_capacity(limit);
        for k in 1..=limit {
            let mut e = spec.companion_generator(k).map_err(GramsError::Spec)?;
            for &j in chosen.iter().filter(|&&j| j < k) {
                e += &difference(spec, j)?;
            }
            out.push(e);
        }
        Ok(out)
    }
}

fn difference(spec: &GramsSpec, k: usize) -> Result<Rat, ChainsError> {
    let a_k = spec.companion_generator(k).map_err(GramsError::Spec)?;
    let a_next = spec.companion_generator(k + 1).map_err(GramsError::Spec)?;
    a_k.checked_sub(&a_next)
        .filter(|d| !d.is_zero())
        .ok_or_else(|| ChainsError::InternalInvariant(format!("chain difference {k} vanishes")))
}

/// Runs `stage_count` stages of the construction over the companion chain
/// `a_k = 1/d_k`, with candidates enumerated ascending from the
/// `enum_truncation`-generator truncation up to `enum_bound`.
///
/// Stage 1 always selects chain index 1 and excludes the zero candidate by
/// the extension witness `b_1`. Every certificate is machine-verified
/// before the construction is returned.
pub fn build_no_mcd_set(
    spec: &GramsSpec,
    stage_count: usize,
    enum_bound: &Rat,
    enum_truncation: usize,
    tail_bound: usize,
) -> Result<NoMcdConstruction, ChainsError> {
    if !spec.n_is_valuation() {
        return Err(ChainsError::UnsupportedChain);
    }
    let enumeration = enumerate_elements(
        &MonoidSpec::GramsLike(spec.clone()),
        enum_bound,
        enum_truncation,
        DEFAULT_NODE_CAP,
    )?;
    if enumeration.len() < stage_count {
        return Err(ChainsError::EnumerationTooShort {
            available: enumeration.len(),
            requested: stage_count,
        });
    }
    if !enumeration.is_empty() && !enumeration[0].is_zero() {
        return Err(ChainsError::InternalInvariant(
            "enumeration must start at zero".into(),
        ));
    }

    let mut chosen: Vec<usize> = Vec::new();
    let mut level = 0usize;
    let mut base = Rat::zero();
    let mut stages = Vec::with_capacity(stage_count);
    let mut max_chain_index = 1usize;

    for (i, candidate) in enumeration.iter().take(stage_count).enumerate() {
        let decision = divides_all_tail(candidate, &base, spec, tail_bound)?;
        if decision.divides_all {
            let new_index = level + 1;
            chosen.push(new_index);
            level = new_index;
            base += &difference(spec, new_index)?;
            max_chain_index = max_chain_index.max(new_index + 1);

            let witness = candidate + &difference(spec, new_index)?;
            let check = divides_all_tail(&witness, &base, spec, tail_bound)?;
            if !check.divides_all {
                return Err(ChainsError::InternalInvariant(format!(
                    "extension witness {witness} fails the tail test"
                )));
            }
            stages.push(Stage {
                index: i + 1,
                candidate: candidate.clone(),
                branch: StageBranch::DividesAll,
                certificate: ExclusionCertificate::ExtensionWitness {
                    witness,
                    mode: check.mode,
                    verified: true,
                },
                chosen_indices: chosen.clone(),
                level,
            });
        } else {
            let failing = decision
                .failing_index
                .ok_or_else(|| ChainsError::InternalInvariant("no failing index".into()))?;
            // Least level jump m > current level whose test element
            // base + a_{m+1} is not divisible; failures are monotone in the
            // chain index, and chain index f corresponds to m = f - 1.
            let m = failing.saturating_sub(1).max(level + 1);
            let element = &base + &spec.companion_generator(m + 1).map_err(GramsError::Spec)?;
            let verified = match grams::divides(candidate, &element, spec)? {
                ThreeVal::False => true,
                _ => false,
            };
            if !verified {
                return Err(ChainsError::InternalInvariant(format!(
                    "non-divisor witness {element} actually divides"
                )));
            }
            level = m;
            max_chain_index = max_chain_index.max(m + 1);
            stages.push(Stage {
                index: i + 1,
                candidate: candidate.clone(),
                branch: StageBranch::FailsAt { index: m },
                certificate: ExclusionCertificate::NonDivisorWitness { element, verified },
                chosen_indices: chosen.clone(),
                level,
            });
        }
    }

    let chain: Result<Vec<Rat>, _> = (1..=max_chain_index)
        .map(|k| spec.companion_generator(k).map_err(GramsError::Spec))
        .collect();
    let differences: Result<Vec<Rat>, ChainsError> =
        (1..=max_chain_index).map(|k| difference(spec, k)).collect();
    Ok(NoMcdConstruction {
        chain: chain?,
        differences: differences?,
        enumeration,
        stages,
    })
}

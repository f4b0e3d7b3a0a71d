//! Monoid family descriptors and their validity checks.
//!
//! A [`MonoidSpec`] names one of four families together with its sequence
//! rules and a truncation index `K`:
//!
//! * `FinGen` — an explicit finite list of positive generators.
//! * `GramsLike` — generators `1/(d_n * p_n)` for a strictly increasing
//!   integer sequence `d` and pairwise distinct primes `p` with
//!   `p_n` never dividing `d_m`; the companion monoid `N` is generated by
//!   the `1/d_n`.
//! * `TwoPrimeReciprocal` — generators `1/(p_n * p_{n+2})` for a strictly
//!   increasing prime sequence.
//! * `Rank2Grams` — the rank-2 monoid generated by the pairs
//!   `(1/(2^n p_{2n}), 0)` and `(1/(2^n p_{2n+1}), 1/p_{2n+1})` over the
//!   full prime sequence (this family is fixed; other prime rules are
//!   rejected).
//!
//! Structural facts about a family hold either for every index (named rules
//! whose constraints are provable in closed form) or only up to the
//! truncation actually checked; every validated spec carries that scope and
//! downstream answers propagate the weaker marker.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::primes::{self, PrimeIndexRule};
use crate::rat::Rat;

/// How far a structural statement about a spec has been established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// Holds for every index of the infinite family.
    ProvenForAll,
    /// Checked exhaustively for indices up to the truncation.
    VerifiedUpToK(usize),
}

impl Scope {
    /// Combines two scopes, keeping the weaker guarantee.
    pub fn and(self, other: Scope) -> Scope {
        match (self, other) {
            (Scope::ProvenForAll, Scope::ProvenForAll) => Scope::ProvenForAll,
            (Scope::VerifiedUpToK(a), Scope::VerifiedUpToK(b)) => {
                Scope::VerifiedUpToK(a.min(b))
            }
            (Scope::VerifiedUpToK(k), _) | (_, Scope::VerifiedUpToK(k)) => {
                Scope::VerifiedUpToK(k)
            }
        }
    }
}

/// Rule for the integer sequence `d` of a Grams-like monoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DenominatorRule {
    /// `d_n = 2^(n-1)`.
    Pow2,
    /// An explicit finite prefix.
    Explicit(Vec<BigUint>),
}

impl DenominatorRule {
    pub fn value(&self, n: usize) -> Result<BigUint, SpecError> {
        assert!(n > 0, "sequence indices are 1-based");
        match self {
            DenominatorRule::Pow2 => Ok(BigUint::one() << (n - 1)),
            DenominatorRule::Explicit(values) => values
                .get(n - 1)
                .cloned()
                .ok_or(SpecError::TruncationExceeded { index: n, len: values.len() }),
        }
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            DenominatorRule::Pow2 => None,
            DenominatorRule::Explicit(v) => Some(v.len()),
        }
    }
}

/// Errors raised by spec operations after validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("index {index} exceeds the explicit prefix of length {len}")]
    TruncationExceeded { index: usize, len: usize },
    #[error(transparent)]
    Rule(#[from] primes::RuleError),
    #[error("operation is not defined for this monoid family")]
    UnsupportedFamily,
}

/// A single violated constraint found during validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    NonIncreasingD { position: usize },
    ZeroD { position: usize },
    CompositeEntry { value: u64 },
    DuplicatePrime { value: u64 },
    PrimeDividesD { prime_index: usize, d_index: usize },
    NonIncreasingPrimes { position: usize },
    EmptyGenerators,
    NonPositiveGenerator { position: usize },
    ZeroTruncation,
    Rank2RuleFixed,
    MissingField { field: &'static str },
    UnexpectedField { field: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonIncreasingD { position } => {
                write!(f, "d sequence is not strictly increasing at position {position}")
            }
            Violation::ZeroD { position } => write!(f, "d_{position} is zero"),
            Violation::CompositeEntry { value } => write!(f, "{value} is not prime"),
            Violation::DuplicatePrime { value } => {
                write!(f, "prime {value} appears more than once")
            }
            Violation::PrimeDividesD { prime_index, d_index } => {
                write!(f, "p_{prime_index} divides d_{d_index}")
            }
            Violation::NonIncreasingPrimes { position } => {
                write!(f, "prime sequence is not strictly increasing at position {position}")
            }
            Violation::EmptyGenerators => write!(f, "generator list is empty"),
            Violation::NonPositiveGenerator { position } => {
                write!(f, "generator {position} is zero")
            }
            Violation::ZeroTruncation => write!(f, "truncation must be positive"),
            Violation::Rank2RuleFixed => {
                write!(f, "the rank-2 family is fixed to the full prime sequence")
            }
            Violation::MissingField { field } => write!(f, "missing field {field:?}"),
            Violation::UnexpectedField { field } => {
                write!(f, "field {field:?} does not apply to this family")
            }
        }
    }
}

/// Validation failure: the full list of violated constraints.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct InvalidSpec {
    pub violations: Vec<Violation>,
}

impl fmt::Display for InvalidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid monoid spec:")?;
        for v in &self.violations {
            write!(f, " [{v}]")?;
        }
        Ok(())
    }
}

/// A validated Grams-like monoid descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramsSpec {
    d_rule: DenominatorRule,
    p_rule: PrimeIndexRule,
    truncation: usize,
    /// True when the `d` sequence is a divisor chain, making the companion
    /// monoid `N` a valuation monoid.
    n_is_valuation: bool,
    /// Scope of the structural constraints (`p_n` never divides `d_m`,
    /// divisor-chain property).
    scope: Scope,
}

impl GramsSpec {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn d_rule(&self) -> &DenominatorRule {
        &self.d_rule
    }

    pub fn p_rule(&self) -> &PrimeIndexRule {
        &self.p_rule
    }

    pub fn n_is_valuation(&self) -> bool {
        self.n_is_valuation
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn is_pow2(&self) -> bool {
        matches!(self.d_rule, DenominatorRule::Pow2)
    }

    pub fn d(&self, n: usize) -> Result<BigUint, SpecError> {
        self.d_rule.value(n)
    }

    pub fn p(&self, n: usize) -> Result<u64, SpecError> {
        Ok(self.p_rule.nth(n)?)
    }

    /// The defining generator `1/(d_n p_n)`.
    pub fn generator(&self, n: usize) -> Result<Rat, SpecError> {
        let den = self.d(n)? * BigUint::from(self.p(n)?);
        Ok(Rat::new(BigUint::one(), den).expect("positive denominator"))
    }

    /// The companion generator `1/d_n`.
    pub fn companion_generator(&self, n: usize) -> Result<Rat, SpecError> {
        Ok(Rat::new(BigUint::one(), self.d(n)?).expect("positive denominator"))
    }

    /// Grams' classical monoid: `d_n = 2^(n-1)`, `p_n` the n-th odd prime.
    pub fn classical(truncation: usize) -> Self {
        GramsSpec {
            d_rule: DenominatorRule::Pow2,
            p_rule: PrimeIndexRule::NthOddPrime,
            truncation,
            n_is_valuation: true,
            scope: Scope::ProvenForAll,
        }
    }
}

/// A validated 2-prime reciprocal monoid descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoPrimeSpec {
    p_rule: PrimeIndexRule,
    truncation: usize,
    scope: Scope,
}

impl TwoPrimeSpec {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn p_rule(&self) -> &PrimeIndexRule {
        &self.p_rule
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn p(&self, n: usize) -> Result<u64, SpecError> {
        Ok(self.p_rule.nth(n)?)
    }

    /// The defining generator `1/(p_n p_{n+2})`.
    pub fn generator(&self, n: usize) -> Result<Rat, SpecError> {
        let den = BigUint::from(self.p(n)?) * BigUint::from(self.p(n + 2)?);
        Ok(Rat::new(BigUint::one(), den).expect("positive denominator"))
    }

    /// The prototype monoid over the full prime sequence.
    pub fn over_all_primes(truncation: usize) -> Self {
        TwoPrimeSpec {
            p_rule: PrimeIndexRule::NthPrime,
            truncation,
            scope: Scope::ProvenForAll,
        }
    }
}

/// The fixed rank-2 family descriptor; only the truncation varies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rank2Spec {
    truncation: usize,
}

impl Rank2Spec {
    pub fn new(truncation: usize) -> Result<Self, InvalidSpec> {
        if truncation == 0 {
            return Err(InvalidSpec { violations: vec![Violation::ZeroTruncation] });
        }
        Ok(Rank2Spec { truncation })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }
}

/// A validated finitely generated monoid descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinGenSpec {
    generators: Vec<Rat>,
}

impl FinGenSpec {
    pub fn new(generators: Vec<Rat>) -> Result<Self, InvalidSpec> {
        let mut violations = Vec::new();
        if generators.is_empty() {
            violations.push(Violation::EmptyGenerators);
        }
        for (i, g) in generators.iter().enumerate() {
            if g.is_zero() {
                violations.push(Violation::NonPositiveGenerator { position: i + 1 });
            }
        }
        if violations.is_empty() {
            Ok(FinGenSpec { generators })
        } else {
            Err(InvalidSpec { violations })
        }
    }

    pub fn generators(&self) -> &[Rat] {
        &self.generators
    }
}

/// A validated monoid descriptor of any family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MonoidSpec {
    FinGen(FinGenSpec),
    GramsLike(GramsSpec),
    TwoPrime(TwoPrimeSpec),
    Rank2(Rank2Spec),
}

/// Generators of a spec: rationals for the rank-1 families, pairs for rank 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GeneratorSet {
    Rank1(Vec<Rat>),
    Rank2(Vec<crate::rank2::Rat2>),
}

/// Structural atom set with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomSet {
    pub atoms: Vec<Rat>,
    /// Short human-readable origin: which structural fact supplies the set.
    pub provenance: &'static str,
    pub scope: Scope,
}

impl MonoidSpec {
    /// Builds and validates a Grams-like spec.
    pub fn grams_like(
        d_rule: DenominatorRule,
        p_rule: PrimeIndexRule,
        truncation: usize,
    ) -> Result<GramsSpec, InvalidSpec> {
        let mut violations = Vec::new();
        if truncation == 0 {
            violations.push(Violation::ZeroTruncation);
        }
        if let Err(e) = p_rule.validate() {
            violations.push(rule_violation(e));
        }
        let k = truncation.max(1);
        let k_d = match d_rule.len() {
            Some(len) => k.min(len),
            None => k,
        };
        let k_p = match p_rule.len() {
            Some(len) => k.min(len),
            None => k,
        };

        // d strictly increasing and positive, checked on the known range.
        let mut prev: Option<BigUint> = None;
        for n in 1..=k_d {
            match d_rule.value(n) {
                Ok(d) => {
                    if d.is_zero() {
                        violations.push(Violation::ZeroD { position: n });
                    }
                    if let Some(p) = &prev {
                        if &d <= p {
                            violations.push(Violation::NonIncreasingD { position: n });
                        }
                    }
                    prev = Some(d);
                }
                Err(_) => break,
            }
        }

        // p_n never divides d_m, checked exhaustively on the truncation. For
        // the pow2 rule with odd primes this holds at every index.
        let proven_for_all = matches!(d_rule, DenominatorRule::Pow2)
            && matches!(p_rule, PrimeIndexRule::NthOddPrime);
        if !proven_for_all {
            for n in 1..=k_p {
                let Ok(p) = p_rule.nth(n) else { break };
                let p_big = BigUint::from(p);
                for m in 1..=k_d {
                    let Ok(d) = d_rule.value(m) else { break };
                    if !d.is_zero() && (d % &p_big).is_zero() {
                        violations.push(Violation::PrimeDividesD {
                            prime_index: n,
                            d_index: m,
                        });
                    }
                }
            }
        }

        if !violations.is_empty() {
            return Err(InvalidSpec { violations });
        }

        // Divisor-chain check for the valuation flag.
        let (n_is_valuation, scope) = match &d_rule {
            DenominatorRule::Pow2 => (true, Scope::ProvenForAll),
            DenominatorRule::Explicit(values) => {
                let chain = (1..k_d.min(values.len()))
                    .all(|n| (&values[n] % &values[n - 1]).is_zero());
                (chain, Scope::VerifiedUpToK(truncation))
            }
        };
        let scope = if proven_for_all { Scope::ProvenForAll } else { scope.and(Scope::VerifiedUpToK(truncation)) };

        Ok(GramsSpec { d_rule, p_rule, truncation, n_is_valuation, scope })
    }

    /// Builds and validates a 2-prime reciprocal spec.
    pub fn two_prime(p_rule: PrimeIndexRule, truncation: usize) -> Result<TwoPrimeSpec, InvalidSpec> {
        let mut violations = Vec::new();
        if truncation == 0 {
            violations.push(Violation::ZeroTruncation);
        }
        if let Err(e) = p_rule.validate() {
            violations.push(rule_violation(e));
        }
        if let PrimeIndexRule::Explicit(primes) = &p_rule {
            for (i, w) in primes.windows(2).enumerate() {
                if w[1] <= w[0] {
                    violations.push(Violation::NonIncreasingPrimes { position: i + 2 });
                }
            }
        }
        if !violations.is_empty() {
            return Err(InvalidSpec { violations });
        }
        let scope = match &p_rule {
            PrimeIndexRule::Explicit(_) => Scope::VerifiedUpToK(truncation),
            _ => Scope::ProvenForAll,
        };
        Ok(TwoPrimeSpec { p_rule, truncation, scope })
    }

    /// First `k` defining generators, in index order.
    pub fn generators(&self, k: usize) -> Result<GeneratorSet, SpecError> {
        match self {
            MonoidSpec::FinGen(spec) => {
                if k > spec.generators.len() {
                    return Err(SpecError::TruncationExceeded {
                        index: k,
                        len: spec.generators.len(),
                    });
                }
                Ok(GeneratorSet::Rank1(spec.generators[..k].to_vec()))
            }
            MonoidSpec::GramsLike(spec) => {
                let gens: Result<Vec<_>, _> = (1..=k).map(|n| spec.generator(n)).collect();
                Ok(GeneratorSet::Rank1(gens?))
            }
            MonoidSpec::TwoPrime(spec) => {
                let gens: Result<Vec<_>, _> = (1..=k).map(|n| spec.generator(n)).collect();
                Ok(GeneratorSet::Rank1(gens?))
            }
            MonoidSpec::Rank2(spec) => {
                let monoid = crate::rank2::Rank2Monoid::new(spec.truncation);
                let mut out = Vec::with_capacity(2 * k);
                for n in 1..=k {
                    let (g, h) = monoid.atom_pair(n);
                    out.push(g);
                    out.push(h);
                }
                Ok(GeneratorSet::Rank2(out))
            }
        }
    }

    /// Structural atom set for the families whose atoms are exactly the
    /// defining generators. For other families there is no structural
    /// theorem and callers fall back to the brute-force oracle.
    pub fn atom_set(&self, k: usize) -> Result<AtomSet, SpecError> {
        match self {
            MonoidSpec::GramsLike(spec) => {
                let GeneratorSet::Rank1(atoms) = self.generators(k)? else { unreachable!() };
                Ok(AtomSet {
                    atoms,
                    provenance: "structural (Grams-like atoms are the defining generators)",
                    scope: spec.scope,
                })
            }
            MonoidSpec::TwoPrime(spec) => {
                let GeneratorSet::Rank1(atoms) = self.generators(k)? else { unreachable!() };
                Ok(AtomSet {
                    atoms,
                    provenance: "structural (2-prime reciprocal atoms are the defining generators)",
                    scope: spec.scope,
                })
            }
            _ => Err(SpecError::UnsupportedFamily),
        }
    }

    pub fn truncation(&self) -> Option<usize> {
        match self {
            MonoidSpec::FinGen(s) => Some(s.generators.len()),
            MonoidSpec::GramsLike(s) => Some(s.truncation),
            MonoidSpec::TwoPrime(s) => Some(s.truncation),
            MonoidSpec::Rank2(s) => Some(s.truncation),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            MonoidSpec::FinGen(_) => "fingen",
            MonoidSpec::GramsLike(_) => "grams-like",
            MonoidSpec::TwoPrime(_) => "two-prime",
            MonoidSpec::Rank2(_) => "rank2",
        }
    }
}

fn rule_violation(e: primes::RuleError) -> Violation {
    match e {
        primes::RuleError::NotPrime(p) => Violation::CompositeEntry { value: p },
        primes::RuleError::DuplicatePrime(p) => Violation::DuplicatePrime { value: p },
        _ => Violation::CompositeEntry { value: 0 },
    }
}

// ---------------------------------------------------------------------------
// JSON configuration format
// ---------------------------------------------------------------------------

/// Raw, unvalidated spec as read from a JSON config file.
///
/// ```json
/// {"family": "grams-like", "d": {"rule": "pow2"},
///  "p": {"rule": "nth-odd-prime"}, "truncation": 4}
/// ```
///
/// `d` also accepts `{"prefix": [1, 2, 6]}`, `p` accepts
/// `{"prefix": [3, 5, 7]}`; the `fingen` family takes
/// `"generators": ["2/3", "1/2"]` instead of sequence rules. Unknown keys
/// are rejected.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<RawRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<RawRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Rat>>,
}

/// A `d` or `p` rule in the config format: either a named rule or a prefix.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawRule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Vec<u64>>,
}

/// Errors from loading a spec config.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed spec config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown family {0:?} (expected grams-like | two-prime | rank2 | fingen)")]
    UnknownFamily(String),
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error(transparent)]
    Invalid(#[from] InvalidSpec),
}

/// Parses and validates a spec from its JSON text.
pub fn from_json_str(text: &str) -> Result<MonoidSpec, ConfigError> {
    let raw: RawSpec = serde_json::from_str(text)?;
    validate(raw)
}

/// Validates a raw spec into a [`MonoidSpec`], or reports every violated
/// constraint.
pub fn validate(raw: RawSpec) -> Result<MonoidSpec, ConfigError> {
    let truncation = raw.truncation.unwrap_or(0);
    match raw.family.as_str() {
        "grams-like" => {
            let mut violations = field_checks(&raw, &["d", "p", "truncation"]);
            let d_rule = match &raw.d {
                None => None,
                Some(r) => match parse_d_rule(r) {
                    Ok(d) => Some(d),
                    Err(e) => return Err(e),
                },
            };
            let p_rule = match &raw.p {
                None => None,
                Some(r) => match parse_p_rule(r) {
                    Ok(p) => Some(p),
                    Err(e) => return Err(e),
                },
            };
            if !violations.is_empty() {
                return Err(InvalidSpec { violations }.into());
            }
            let (Some(d_rule), Some(p_rule)) = (d_rule, p_rule) else {
                violations.push(Violation::MissingField { field: "d/p" });
                return Err(InvalidSpec { violations }.into());
            };
            Ok(MonoidSpec::GramsLike(MonoidSpec::grams_like(d_rule, p_rule, truncation)?))
        }
        "two-prime" => {
            let violations = field_checks(&raw, &["p", "truncation"]);
            if !violations.is_empty() {
                return Err(InvalidSpec { violations }.into());
            }
            let Some(p) = &raw.p else {
                return Err(InvalidSpec {
                    violations: vec![Violation::MissingField { field: "p" }],
                }
                .into());
            };
            let p_rule = parse_p_rule(p)?;
            Ok(MonoidSpec::TwoPrime(MonoidSpec::two_prime(p_rule, truncation)?))
        }
        "rank2" => {
            let mut violations = field_checks(&raw, &["truncation"]);
            if let Some(p) = &raw.p {
                // Only the full prime sequence is supported.
                match parse_p_rule(p)? {
                    PrimeIndexRule::NthPrime => {}
                    _ => violations.push(Violation::Rank2RuleFixed),
                }
            }
            if !violations.is_empty() {
                return Err(InvalidSpec { violations }.into());
            }
            Ok(MonoidSpec::Rank2(Rank2Spec::new(truncation)?))
        }
        "fingen" => {
            let violations = field_checks(&raw, &["generators"]);
            if !violations.is_empty() {
                return Err(InvalidSpec { violations }.into());
            }
            let Some(gens) = raw.generators else {
                return Err(InvalidSpec {
                    violations: vec![Violation::MissingField { field: "generators" }],
                }
                .into());
            };
            Ok(MonoidSpec::FinGen(FinGenSpec::new(gens)?))
        }
        other => Err(ConfigError::UnknownFamily(other.to_string())),
    }
}

fn field_checks(raw: &RawSpec, allowed: &[&str]) -> Vec<Violation> {
    let mut violations = Vec::new();
    let has = |name: &str| match name {
        "d" => raw.d.is_some(),
        "p" => raw.p.is_some(),
        "truncation" => raw.truncation.is_some(),
        "generators" => raw.generators.is_some(),
        _ => false,
    };
    for field in ["d", "p", "truncation", "generators"] {
        if has(field) && !allowed.contains(&field) && !(field == "p" && raw.family == "rank2") {
            violations.push(Violation::UnexpectedField {
                field: match field {
                    "d" => "d",
                    "p" => "p",
                    "truncation" => "truncation",
                    _ => "generators",
                },
            });
        }
    }
    for field in allowed {
        if *field == "truncation" && !has(field) && raw.family != "fingen" {
            violations.push(Violation::MissingField { field: "truncation" });
        }
    }
    violations
}

fn parse_d_rule(raw: &RawRule) -> Result<DenominatorRule, ConfigError> {
    match (&raw.rule, &raw.prefix) {
        (Some(name), None) if name == "pow2" => Ok(DenominatorRule::Pow2),
        (Some(name), None) => Err(ConfigError::UnknownRule(name.clone())),
        (None, Some(prefix)) => Ok(DenominatorRule::Explicit(
            prefix.iter().map(|&v| BigUint::from(v)).collect(),
        )),
        _ => Err(ConfigError::UnknownRule("expected exactly one of rule/prefix".into())),
    }
}

fn parse_p_rule(raw: &RawRule) -> Result<PrimeIndexRule, ConfigError> {
    match (&raw.rule, &raw.prefix) {
        (Some(name), None) if name == "nth-prime" => Ok(PrimeIndexRule::NthPrime),
        (Some(name), None) if name == "nth-odd-prime" => Ok(PrimeIndexRule::NthOddPrime),
        (Some(name), None) => Err(ConfigError::UnknownRule(name.clone())),
        (None, Some(prefix)) => Ok(PrimeIndexRule::Explicit(prefix.clone())),
        _ => Err(ConfigError::UnknownRule("expected exactly one of rule/prefix".into())),
    }
}

/// Deduplicated, sorted prime support of a set of denominators; used by
/// callers that must match oracle truncations to structural answers.
pub fn denominator_prime_support(values: &[Rat]) -> Result<BTreeSet<u64>, primes::FactorError> {
    let mut out = BTreeSet::new();
    for v in values {
        for (p, _) in primes::factor(v.den())? {
            out.insert(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn classical_grams_is_valid() {
        let spec = MonoidSpec::grams_like(DenominatorRule::Pow2, PrimeIndexRule::NthOddPrime, 5)
            .unwrap();
        assert!(spec.n_is_valuation());
        assert_eq!(spec.scope(), Scope::ProvenForAll);
    }

    #[test]
    fn prime_dividing_d_is_rejected() {
        let d = DenominatorRule::Explicit(vec![1u32.into(), 2u32.into(), 3u32.into()]);
        let p = PrimeIndexRule::Explicit(vec![3, 5, 7]);
        let err = MonoidSpec::grams_like(d, p, 3).unwrap_err();
        assert!(err
            .violations
            .contains(&Violation::PrimeDividesD { prime_index: 1, d_index: 3 }));
    }

    #[test]
    fn two_prime_requires_increasing_primes() {
        let err =
            MonoidSpec::two_prime(PrimeIndexRule::Explicit(vec![5, 3, 7]), 3).unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonIncreasingPrimes { .. })));
    }

    #[test]
    fn pow2_with_all_primes_is_rejected() {
        // p_1 = 2 divides every d_m = 2^(m-1) with m >= 2.
        let err =
            MonoidSpec::grams_like(DenominatorRule::Pow2, PrimeIndexRule::NthPrime, 3)
                .unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, Violation::PrimeDividesD { prime_index: 1, .. })));
    }

    #[test]
    fn generators_examples() {
        let grams = MonoidSpec::GramsLike(GramsSpec::classical(4));
        let GeneratorSet::Rank1(g) = grams.generators(3).unwrap() else { panic!() };
        assert_eq!(g, vec![r("1/3"), r("1/10"), r("1/28")]);

        let mp = MonoidSpec::TwoPrime(TwoPrimeSpec::over_all_primes(6));
        let GeneratorSet::Rank1(g) = mp.generators(4).unwrap() else { panic!() };
        assert_eq!(g, vec![r("1/10"), r("1/21"), r("1/55"), r("1/91")]);
    }

    #[test]
    fn rank2_generators_example() {
        let spec = MonoidSpec::Rank2(Rank2Spec::new(2).unwrap());
        let GeneratorSet::Rank2(g) = spec.generators(1).unwrap() else { panic!() };
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].x, r("1/6"));
        assert_eq!(g[0].y, Rat::zero());
        assert_eq!(g[1].x, r("1/10"));
        assert_eq!(g[1].y, r("1/5"));
    }

    #[test]
    fn atom_set_structural_and_fallback() {
        let grams = MonoidSpec::GramsLike(GramsSpec::classical(4));
        let atoms = grams.atom_set(2).unwrap();
        assert_eq!(atoms.atoms, vec![r("1/3"), r("1/10")]);
        assert!(atoms.provenance.starts_with("structural"));

        let mp = MonoidSpec::TwoPrime(TwoPrimeSpec::over_all_primes(6));
        assert_eq!(mp.atom_set(2).unwrap().atoms, vec![r("1/10"), r("1/21")]);

        let fingen = MonoidSpec::FinGen(FinGenSpec::new(vec![r("2/3"), r("1/2")]).unwrap());
        assert_eq!(fingen.atom_set(2), Err(SpecError::UnsupportedFamily));
    }

    #[test]
    fn config_round_trip_and_unknown_keys() {
        let spec = from_json_str(
            r#"{"family":"grams-like","d":{"rule":"pow2"},"p":{"rule":"nth-odd-prime"},"truncation":4}"#,
        )
        .unwrap();
        assert_eq!(spec.family_name(), "grams-like");

        let err = from_json_str(
            r#"{"family":"grams-like","d":{"rule":"pow2"},"p":{"rule":"nth-odd-prime"},"truncation":4,"extra":1}"#,
        );
        assert!(matches!(err, Err(ConfigError::Json(_))));

        let err = from_json_str(r#"{"family":"nope"}"#);
        assert!(matches!(err, Err(ConfigError::UnknownFamily(_))));
    }

    #[test]
    fn fingen_config() {
        let spec =
            from_json_str(r#"{"family":"fingen","generators":["3","5"]}"#).unwrap();
        let GeneratorSet::Rank1(g) = spec.generators(2).unwrap() else { panic!() };
        assert_eq!(g, vec![r("3"), r("5")]);
    }
}

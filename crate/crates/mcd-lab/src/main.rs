//! `mcd-lab`: load a monoid spec, run one operation, print the result.
//!
//! Subcommands mirror the library operations one to one. Results are printed
//! either as human-oriented text (default) or as schema-stable JSON
//! (`--json`); rationals cross the boundary only as `num/den` strings.
//!
//! Exit codes: 0 success, 1 invalid input, 2 the answer is unknown at this
//! truncation or a search budget was exhausted, 3 an internal invariant was
//! violated.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mcd_core::budget::DEFAULT_NODE_CAP;
use mcd_core::chains;
use mcd_core::grams;
use mcd_core::oracle::Oracle;
use mcd_core::rank2::{Rank2Monoid, Rat2};
use mcd_core::rat::Rat;
use mcd_core::spec::{self, GeneratorSet, MonoidSpec, SpecError};
use mcd_core::two_prime;
use mcd_core::ThreeVal;

/// Exact-arithmetic experiments with divisibility in Puiseux monoids.
#[derive(Parser)]
#[command(name = "mcd-lab", version, about)]
struct Cli {
    #[command(flatten)]
    run: RunOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    /// Path to the monoid spec config (JSON).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Override the spec's truncation index.
    #[arg(long, global = true)]
    truncation: Option<usize>,

    /// Node cap for exhaustive searches (falls back to MCD_LAB_NODE_CAP,
    /// then the built-in default).
    #[arg(long, global = true)]
    node_cap: Option<u64>,

    /// Seed for seeded batch operations. Accepted for reproducibility
    /// plumbing; the listed subcommands are fully deterministic and do not
    /// sample.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the spec file and report its structural flags.
    Validate,
    /// Print the first K defining generators.
    Generators {
        /// How many generators (defaults to the spec's truncation).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Print the structural atom set (or fall back to the oracle).
    Atoms {
        #[arg(long)]
        count: Option<usize>,
    },
    /// Canonical decomposition of an element (Grams-like specs).
    Decompose { value: Rat },
    /// Membership of an element in the monoid.
    Member { value: String },
    /// Does the first element divide the second?
    Divides { a: String, b: String },
    /// A maximal common divisor of the given members.
    Mcd { values: Vec<Rat> },
    /// Every MCD with a given c0-part (Grams-like specs).
    McdEnum {
        values: Vec<Rat>,
        /// c0-part candidates; defaults to the minimum c0-part.
        #[arg(long)]
        c0: Vec<Rat>,
    },
    /// Links of a strictly ascending chain of principal ideals.
    Chain {
        /// Number of links to emit.
        #[arg(long, default_value_t = 3)]
        links: usize,
        /// Chain parity for 2-prime reciprocal monoids.
        #[arg(long, value_enum)]
        parity: Option<ParityArg>,
    },
    /// MCD by divisor descent (finitely generated specs).
    Descent { values: Vec<Rat> },
    /// Staged construction of a set with no MCD (Grams-like pow2 specs).
    NoMcdSet {
        #[arg(long, default_value_t = 4)]
        stages: usize,
        /// Enumeration bound for stage candidates.
        #[arg(long, default_value = "1/3")]
        bound: Rat,
        /// Chain-index bound for the non-pow2 fallback mode.
        #[arg(long, default_value_t = chains::DEFAULT_TAIL_BOUND)]
        tail_bound: usize,
    },
    /// No-MCD analysis of the pair {(1,0), (1,1)} (rank-2 specs).
    Rank2 {
        /// Only print the improvement chain of this length from zero.
        #[arg(long)]
        chain: Option<usize>,
    },
    /// Brute-force oracle runs on the spec's truncation generators.
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
}

#[derive(Subcommand)]
enum OracleOp {
    /// All factorizations of a value over the truncation generators.
    Factorize { value: Rat },
    /// Membership in the truncation.
    Member { value: Rat },
    /// All common divisors of the given members, ascending.
    CommonDivisors { values: Vec<Rat> },
    /// All maximal common divisors of the given members.
    Mcd { values: Vec<Rat> },
    /// Is the value an atom of the truncation?
    Atom { value: Rat },
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

/// Outcome classification for the process exit code.
enum Failure {
    InvalidInput(String),
    Unknown(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::InvalidInput(_) => 1,
            Failure::Unknown(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::InvalidInput(m) | Failure::Unknown(m) | Failure::Internal(m) => m,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message())
    }
}

fn invalid<E: fmt::Display>(e: E) -> Failure {
    Failure::InvalidInput(e.to_string())
}

fn classify_grams(e: grams::GramsError) -> Failure {
    use grams::GramsError::*;
    match e {
        UnclassifiablePrime { .. } | Overflow { .. } | Inconclusive { .. } => {
            Failure::Unknown(e.to_string())
        }
        InternalInvariant(_) => Failure::Internal(e.to_string()),
        _ => Failure::InvalidInput(e.to_string()),
    }
}

fn classify_two_prime(e: two_prime::TwoPrimeError) -> Failure {
    use two_prime::TwoPrimeError::*;
    match e {
        UnclassifiablePrime { .. } | Overflow { .. } => Failure::Unknown(e.to_string()),
        InternalInvariant(_) => Failure::Internal(e.to_string()),
        _ => Failure::InvalidInput(e.to_string()),
    }
}

fn classify_chains(e: chains::ChainsError) -> Failure {
    use chains::ChainsError::*;
    match e {
        Oracle(mcd_core::oracle::OracleError::Overflow { .. }) => Failure::Unknown(e.to_string()),
        Grams(inner) => classify_grams(inner),
        InternalInvariant(_) => Failure::Internal(e.to_string()),
        _ => Failure::InvalidInput(e.to_string()),
    }
}

fn classify_oracle(e: mcd_core::oracle::OracleError) -> Failure {
    match e {
        mcd_core::oracle::OracleError::Overflow { .. } => Failure::Unknown(e.to_string()),
        other => Failure::InvalidInput(other.to_string()),
    }
}

fn classify_rank2(e: mcd_core::rank2::Rank2Error) -> Failure {
    use mcd_core::rank2::Rank2Error::*;
    match e {
        ImprovementNotFound { .. } => Failure::Unknown(e.to_string()),
        other => Failure::InvalidInput(other.to_string()),
    }
}

/// A rendered result: a JSON payload plus its text form.
struct Rendered {
    payload: serde_json::Value,
    text: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rendered) => {
            if cli.run.json {
                println!("{}", rendered.payload);
            } else {
                println!("{}", rendered.text);
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

fn node_cap(opts: &RunOpts) -> u64 {
    opts.node_cap
        .or_else(|| {
            std::env::var("MCD_LAB_NODE_CAP")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_NODE_CAP)
}

fn load_spec(opts: &RunOpts) -> Result<MonoidSpec, Failure> {
    let path = opts
        .spec
        .as_ref()
        .ok_or_else(|| Failure::InvalidInput("--spec PATH is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut raw: spec::RawSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::InvalidInput(format!("malformed spec config: {e}")))?;
    if let Some(k) = opts.truncation {
        raw.truncation = Some(k);
    }
    spec::validate(raw).map_err(classify_config)
}

fn classify_config(e: spec::ConfigError) -> Failure {
    Failure::InvalidInput(e.to_string())
}

fn run(cli: &Cli) -> Result<Rendered, Failure> {
    let opts = &cli.run;
    match &cli.command {
        Command::Validate => cmd_validate(opts),
        Command::Generators { count } => cmd_generators(opts, *count),
        Command::Atoms { count } => cmd_atoms(opts, *count),
        Command::Decompose { value } => cmd_decompose(opts, value),
        Command::Member { value } => cmd_member(opts, value),
        Command::Divides { a, b } => cmd_divides(opts, a, b),
        Command::Mcd { values } => cmd_mcd(opts, values),
        Command::McdEnum { values, c0 } => cmd_mcd_enum(opts, values, c0),
        Command::Chain { links, parity } => cmd_chain(opts, *links, *parity),
        Command::Descent { values } => cmd_descent(opts, values),
        Command::NoMcdSet { stages, bound, tail_bound } => {
            cmd_no_mcd_set(opts, *stages, bound, *tail_bound)
        }
        Command::Rank2 { chain } => cmd_rank2(opts, *chain),
        Command::Oracle { op } => cmd_oracle(opts, op),
    }
}

fn cmd_validate(opts: &RunOpts) -> Result<Rendered, Failure> {
    // Report violations rather than failing: an invalid spec is a valid
    // *answer* for this subcommand, but still exits nonzero.
    let path = opts
        .spec
        .as_ref()
        .ok_or_else(|| Failure::InvalidInput("--spec PATH is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut raw: spec::RawSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::InvalidInput(format!("malformed spec config: {e}")))?;
    if let Some(k) = opts.truncation {
        raw.truncation = Some(k);
    }
    match spec::validate(raw) {
        Ok(validated) => {
            let mut payload = json!({
                "valid": true,
                "family": validated.family_name(),
            });
            if let MonoidSpec::GramsLike(g) = &validated {
                payload["n_is_valuation"] = json!(g.n_is_valuation());
                payload["scope"] = serde_json::to_value(g.scope()).unwrap();
            }
            if let MonoidSpec::TwoPrime(t) = &validated {
                payload["scope"] = serde_json::to_value(t.scope()).unwrap();
            }
            let text = format!("valid {} spec", validated.family_name());
            Ok(Rendered { payload, text })
        }
        Err(spec::ConfigError::Invalid(invalid_spec)) => {
            let violations: Vec<String> =
                invalid_spec.violations.iter().map(|v| v.to_string()).collect();
            Err(Failure::InvalidInput(format!(
                "invalid spec: {}",
                violations.join("; ")
            )))
        }
        Err(e) => Err(classify_config(e)),
    }
}

fn cmd_generators(opts: &RunOpts, count: Option<usize>) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    let k = count.or(spec.truncation()).unwrap_or(1);
    match spec.generators(k).map_err(spec_failure)? {
        GeneratorSet::Rank1(gens) => {
            let text = gens.iter().map(Rat::to_string).collect::<Vec<_>>().join(" ");
            Ok(Rendered { payload: json!(gens), text })
        }
        GeneratorSet::Rank2(gens) => {
            let text = gens.iter().map(Rat2::to_string).collect::<Vec<_>>().join(" ");
            Ok(Rendered { payload: json!(gens), text })
        }
    }
}

fn spec_failure(e: SpecError) -> Failure {
    match e {
        SpecError::TruncationExceeded { .. } => Failure::Unknown(e.to_string()),
        SpecError::Rule(mcd_core::primes::RuleError::TruncationExceeded { .. }) => {
            Failure::Unknown(e.to_string())
        }
        other => Failure::InvalidInput(other.to_string()),
    }
}

fn cmd_atoms(opts: &RunOpts, count: Option<usize>) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    let k = count.or(spec.truncation()).unwrap_or(1);
    match spec.atom_set(k) {
        Ok(set) => {
            let payload = serde_json::to_value(&set).unwrap();
            let text = format!(
                "{}  [{}]",
                set.atoms.iter().map(Rat::to_string).collect::<Vec<_>>().join(" "),
                set.provenance
            );
            Ok(Rendered { payload, text })
        }
        Err(SpecError::UnsupportedFamily) => {
            // No structural theorem: fall back to the brute-force oracle on
            // the defining generators.
            let GeneratorSet::Rank1(gens) = spec.generators(k).map_err(spec_failure)? else {
                return Err(Failure::InvalidInput(
                    "atoms fallback applies to rank-1 specs only".into(),
                ));
            };
            let oracle = Oracle::new(gens.clone(), node_cap(opts)).map_err(classify_oracle)?;
            let mut atoms = Vec::new();
            for g in &gens {
                if oracle.is_atom(g).map_err(classify_oracle)? {
                    atoms.push(g.clone());
                }
            }
            let payload = json!({
                "atoms": atoms,
                "provenance": "brute-force (no structural theorem for this family)",
            });
            let text = format!(
                "{}  [brute-force]",
                atoms.iter().map(Rat::to_string).collect::<Vec<_>>().join(" ")
            );
            Ok(Rendered { payload, text })
        }
        Err(e) => Err(spec_failure(e)),
    }
}

fn require_grams(spec: &MonoidSpec) -> Result<&mcd_core::spec::GramsSpec, Failure> {
    match spec {
        MonoidSpec::GramsLike(g) => Ok(g),
        _ => Err(Failure::InvalidInput(format!(
            "this operation needs a grams-like spec, got {}",
            spec.family_name()
        ))),
    }
}

fn cmd_decompose(opts: &RunOpts, value: &Rat) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    let g = require_grams(&spec)?;
    match grams::canonical_decompose(value, g).map_err(classify_grams)? {
        grams::Membership::Member(d) => {
            let coeffs: BTreeMap<String, u64> =
                d.coeffs.iter().map(|(&n, &c)| (n.to_string(), c)).collect();
            let payload = json!({"c0": d.c0, "coeffs": coeffs});
            let text = {
                let mut parts = vec![format!("c0 = {}", d.c0)];
                parts.extend(d.coeffs.iter().map(|(n, c)| format!("c_{n} = {c}")));
                parts.join(", ")
            };
            Ok(Rendered { payload, text })
        }
        grams::Membership::NotMember(reason) => {
            let payload = json!({"member": false, "reason": reason_string(reason)});
            Ok(Rendered {
                payload,
                text: format!("not a member ({})", reason_string(reason)),
            })
        }
        grams::Membership::Unknown { truncation } => Err(Failure::Unknown(format!(
            "membership unknown at truncation {truncation}"
        ))),
    }
}

fn reason_string(reason: grams::NotMemberReason) -> &'static str {
    match reason {
        grams::NotMemberReason::ValuationTooNegative { .. } => "valuation too negative",
        grams::NotMemberReason::NegativeResidual => "negative residual",
        grams::NotMemberReason::ResidualNotInN => "residual outside the companion monoid",
    }
}

fn cmd_member(opts: &RunOpts, value: &str) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    match &spec {
        MonoidSpec::GramsLike(g) => {
            let q: Rat = value.parse().map_err(invalid)?;
            match grams::canonical_decompose(&q, g).map_err(classify_grams)? {
                grams::Membership::Member(_) => Ok(render_member(ThreeVal::True, None)),
                grams::Membership::NotMember(reason) => {
                    Ok(render_member(ThreeVal::False, Some(reason_string(reason))))
                }
                grams::Membership::Unknown { truncation } => Err(Failure::Unknown(format!(
                    "membership unknown at truncation {truncation}"
                ))),
            }
        }
        MonoidSpec::TwoPrime(t) => {
            let q: Rat = value.parse().map_err(invalid)?;
            match two_prime::is_member(&q, t, node_cap(opts)).map_err(classify_two_prime)? {
                ThreeVal::Unknown { truncation } => Err(Failure::Unknown(format!(
                    "membership unknown at truncation {truncation}"
                ))),
                v => Ok(render_member(v, None)),
            }
        }
        MonoidSpec::Rank2(r) => {
            let q: Rat2 = value.parse().map_err(invalid)?;
            let monoid = Rank2Monoid::new(r.truncation());
            match monoid.is_member(&q).map_err(classify_rank2)? {
                ThreeVal::Unknown { truncation } => Err(Failure::Unknown(format!(
                    "member of the monoid, but only beyond truncation {truncation}"
                ))),
                v => Ok(render_member(v, None)),
            }
        }
        MonoidSpec::FinGen(f) => {
            let q: Rat = value.parse().map_err(invalid)?;
            let oracle =
                Oracle::new(f.generators().to_vec(), node_cap(opts)).map_err(classify_oracle)?;
            let member = oracle.is_member(&q).map_err(classify_oracle)?;
            Ok(render_member(if member { ThreeVal::True } else { ThreeVal::False }, None))
        }
    }
}

fn render_member(v: ThreeVal, reason: Option<&str>) -> Rendered {
    match v {
        ThreeVal::True => Rendered { payload: json!({"member": true}), text: "true".into() },
        ThreeVal::False => {
            let payload = match reason {
                Some(r) => json!({"member": false, "reason": r}),
                None => json!({"member": false}),
            };
            let text = match reason {
                Some(r) => format!("false ({r})"),
                None => "false".into(),
            };
            Rendered { payload, text }
        }
        ThreeVal::Unknown { truncation } => Rendered {
            payload: json!({"member": "unknown", "truncation": truncation}),
            text: format!("unknown (truncation {truncation})"),
        },
    }
}

fn cmd_divides(opts: &RunOpts, a: &str, b: &str) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    let verdict = match &spec {
        MonoidSpec::GramsLike(g) => {
            let a: Rat = a.parse().map_err(invalid)?;
            let b: Rat = b.parse().map_err(invalid)?;
            grams::divides(&a, &b, g).map_err(classify_grams)?
        }
        MonoidSpec::TwoPrime(t) => {
            let a: Rat = a.parse().map_err(invalid)?;
            let b: Rat = b.parse().map_err(invalid)?;
            two_prime::divides(&a, &b, t, node_cap(opts)).map_err(classify_two_prime)?
        }
        MonoidSpec::Rank2(r) => {
            let a: Rat2 = a.parse().map_err(invalid)?;
            let b: Rat2 = b.parse().map_err(invalid)?;
            let monoid = Rank2Monoid::new(r.truncation());
            if monoid.divides_in_monoid(&a, &b).map_err(classify_rank2)? {
                ThreeVal::True
            } else {
                ThreeVal::False
            }
        }
        MonoidSpec::FinGen(f) => {
            let a: Rat = a.parse().map_err(invalid)?;
            let b: Rat = b.parse().map_err(invalid)?;
            let oracle =
                Oracle::new(f.generators().to_vec(), node_cap(opts)).map_err(classify_oracle)?;
            match b.checked_sub(&a) {
                None => ThreeVal::False,
                Some(diff) => {
                    if oracle.is_member(&diff).map_err(classify_oracle)? {
                        ThreeVal::True
                    } else {
                        ThreeVal::False
                    }
                }
            }
        }
    };
    match verdict {
        ThreeVal::Unknown { truncation } => Err(Failure::Unknown(format!(
            "divisibility unknown at truncation {truncation}"
        ))),
        v => Ok(Rendered {
            payload: json!({"divides": v.is_true()}),
            text: if v.is_true() { "true".into() } else { "false".into() },
        }),
    }
}

fn cmd_mcd(opts: &RunOpts, values: &[Rat]) -> Result<Rendered, Failure> {
    if values.is_empty() {
        return Err(Failure::InvalidInput("mcd needs at least one member".into()));
    }
    let spec = load_spec(opts)?;
    let cap = node_cap(opts);
    match &spec {
        MonoidSpec::GramsLike(g) => {
            let out = grams::mcd(values, g, cap).map_err(classify_grams)?;
            Ok(Rendered {
                payload: json!(out.value),
                text: out.value.to_string(),
            })
        }
        MonoidSpec::TwoPrime(t) => {
            let out = two_prime::mcd(values, t, cap).map_err(classify_two_prime)?;
            Ok(Rendered {
                payload: json!(out.value),
                text: out.value.to_string(),
            })
        }
        MonoidSpec::FinGen(f) => {
            let out = chains::mcd_descent(values, f, cap).map_err(classify_chains)?;
            Ok(Rendered { payload: json!(out.value), text: out.value.to_string() })
        }
        MonoidSpec::Rank2(_) => Err(Failure::InvalidInput(
            "mcd applies to rank-1 specs; use the rank2 subcommand".into(),
        )),
    }
}

fn cmd_mcd_enum(opts: &RunOpts, values: &[Rat], c0: &[Rat]) -> Result<Rendered, Failure> {
    if values.is_empty() {
        return Err(Failure::InvalidInput("mcd-enum needs at least one member".into()));
    }
    let spec = load_spec(opts)?;
    let g = require_grams(&spec)?;
    let candidates = if c0.is_empty() { None } else { Some(c0.to_vec()) };
    let mcds =
        grams::enumerate_mcds(values, g, candidates, node_cap(opts)).map_err(classify_grams)?;
    Ok(Rendered {
        payload: json!(mcds),
        text: if mcds.is_empty() {
            "none".into()
        } else {
            mcds.iter().map(Rat::to_string).collect::<Vec<_>>().join(" ")
        },
    })
}

fn cmd_chain(opts: &RunOpts, links: usize, parity: Option<ParityArg>) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    match &spec {
        MonoidSpec::GramsLike(g) => {
            let mut out = Vec::with_capacity(links);
            for n in 1..=links {
                out.push(grams::accp_chain_link(g, n).map_err(classify_grams)?);
            }
            let text = out
                .iter()
                .map(|l| {
                    format!(
                        "{} = {} + {}",
                        l.ideal_generator, l.successor, l.difference
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Rendered { payload: serde_json::to_value(&out).unwrap(), text })
        }
        MonoidSpec::TwoPrime(t) => {
            let parity = match parity {
                Some(ParityArg::Odd) | None => two_prime::ChainParity::Odd,
                Some(ParityArg::Even) => two_prime::ChainParity::Even,
            };
            let mut out = Vec::with_capacity(links);
            for n in 1..=links {
                out.push(two_prime::chain_witness(t, parity, n).map_err(classify_two_prime)?);
            }
            let text = out
                .iter()
                .map(|l| {
                    format!(
                        "{} = {} + {} * {}",
                        l.ideal_generator, l.successor, l.multiplicity, l.atom
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Rendered { payload: serde_json::to_value(&out).unwrap(), text })
        }
        _ => Err(Failure::InvalidInput(
            "chain applies to grams-like and two-prime specs".into(),
        )),
    }
}

fn cmd_descent(opts: &RunOpts, values: &[Rat]) -> Result<Rendered, Failure> {
    if values.is_empty() {
        return Err(Failure::InvalidInput("descent needs at least one member".into()));
    }
    let spec = load_spec(opts)?;
    let MonoidSpec::FinGen(f) = &spec else {
        return Err(Failure::InvalidInput("descent applies to fingen specs".into()));
    };
    let out = chains::mcd_descent(values, f, node_cap(opts)).map_err(classify_chains)?;
    let text = format!(
        "{} (steps: {})",
        out.value,
        if out.steps.is_empty() {
            "none".to_string()
        } else {
            out.steps.iter().map(Rat::to_string).collect::<Vec<_>>().join(" ")
        }
    );
    Ok(Rendered { payload: serde_json::to_value(&out).unwrap(), text })
}

fn cmd_no_mcd_set(
    opts: &RunOpts,
    stages: usize,
    bound: &Rat,
    tail_bound: usize,
) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    let g = require_grams(&spec)?;
    let enum_truncation = g.truncation();
    let built = chains::build_no_mcd_set(g, stages, bound, enum_truncation, tail_bound)
        .map_err(classify_chains)?;
    let text = {
        let mut lines = Vec::new();
        for stage in &built.stages {
            let branch = match stage.branch {
                chains::StageBranch::DividesAll => "divides-all".to_string(),
                chains::StageBranch::FailsAt { index } => format!("fails-at({index})"),
            };
            lines.push(format!(
                "stage {}: candidate {} -> {} [S = {:?}, level {}]",
                stage.index, stage.candidate, branch, stage.chosen_indices, stage.level
            ));
        }
        lines.join("\n")
    };
    Ok(Rendered { payload: serde_json::to_value(&built).unwrap(), text })
}

fn cmd_rank2(opts: &RunOpts, chain: Option<usize>) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    let MonoidSpec::Rank2(r) = &spec else {
        return Err(Failure::InvalidInput("rank2 applies to rank2 specs".into()));
    };
    let monoid = Rank2Monoid::new(r.truncation());
    if let Some(steps) = chain {
        let chain = monoid.improvement_chain(steps).map_err(classify_rank2)?;
        let text = chain.iter().map(Rat2::to_string).collect::<Vec<_>>().join(" -> ");
        return Ok(Rendered { payload: serde_json::to_value(&chain).unwrap(), text });
    }
    let report = monoid.verify_not_two_mcd().map_err(classify_rank2)?;
    let text = format!(
        "{} common divisors of {{(1,0),(1,1)}} found at truncation {}; every one strictly improved: {}",
        report.divisors.len(),
        report.truncation,
        report.all_strictly_improved
    );
    Ok(Rendered { payload: serde_json::to_value(&report).unwrap(), text })
}

fn cmd_oracle(opts: &RunOpts, op: &OracleOp) -> Result<Rendered, Failure> {
    let spec = load_spec(opts)?;
    let k = spec.truncation().unwrap_or(1);
    let GeneratorSet::Rank1(gens) = spec.generators(k).map_err(spec_failure)? else {
        return Err(Failure::InvalidInput("oracle applies to rank-1 specs".into()));
    };
    let oracle = Oracle::new(gens, node_cap(opts)).map_err(classify_oracle)?;
    match op {
        OracleOp::Factorize { value } => {
            let sols = oracle.factorize_all(value).map_err(classify_oracle)?;
            let text = if sols.is_empty() {
                "none".to_string()
            } else {
                sols.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("\n")
            };
            Ok(Rendered { payload: serde_json::to_value(&sols).unwrap(), text })
        }
        OracleOp::Member { value } => {
            let member = oracle.is_member(value).map_err(classify_oracle)?;
            Ok(render_member(if member { ThreeVal::True } else { ThreeVal::False }, None))
        }
        OracleOp::CommonDivisors { values } => {
            if values.is_empty() {
                return Err(Failure::InvalidInput("need at least one member".into()));
            }
            let divisors = oracle.common_divisors(values).map_err(classify_oracle)?;
            Ok(Rendered {
                payload: json!(divisors),
                text: divisors.iter().map(Rat::to_string).collect::<Vec<_>>().join(" "),
            })
        }
        OracleOp::Mcd { values } => {
            if values.is_empty() {
                return Err(Failure::InvalidInput("need at least one member".into()));
            }
            let mcds = oracle.mcds(values).map_err(classify_oracle)?;
            Ok(Rendered {
                payload: json!(mcds),
                text: mcds.iter().map(Rat::to_string).collect::<Vec<_>>().join(" "),
            })
        }
        OracleOp::Atom { value } => {
            let is_atom = oracle.is_atom(value).map_err(classify_oracle)?;
            Ok(Rendered {
                payload: json!({"atom": is_atom}),
                text: is_atom.to_string(),
            })
        }
    }
}

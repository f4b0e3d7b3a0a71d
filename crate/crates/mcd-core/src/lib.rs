//! Exact-arithmetic toolkit for divisibility in Puiseux monoids.
//!
//! The crate makes a family of additive submonoids of the nonnegative
//! rationals computable: canonical decompositions, membership and
//! divisibility deciders, constructive maximal-common-divisor (MCD)
//! searches, chain witnesses for the failure of the ascending chain
//! condition on principal ideals (ACCP), and a construction of subsets with
//! no MCD at all. A rank-2 companion monoid shows that even atomic monoids
//! can fail to be 2-MCD.
//!
//! All arithmetic is exact; there is no floating point anywhere. Structural
//! algorithms are cross-checked against an independent brute-force
//! [`oracle`] on finite truncations, and every exhaustive search is bounded
//! by a node cap that fails loudly instead of answering wrongly.
//!
//! Module map:
//!
//! * [`rat`] — exact nonnegative rationals and p-adic valuations.
//! * [`primes`] — deterministic primality, prime sequences, factoring.
//! * [`spec`] — monoid family descriptors and validation.
//! * [`oracle`] — exhaustive ground truth on finitely generated truncations.
//! * [`grams`] — canonical decompositions and MCD search for Grams-like
//!   monoids `<1/(d_n p_n)>`.
//! * [`two_prime`] — reductions and MCD search for 2-prime reciprocal
//!   monoids `<1/(p_n p_{n+2})>`.
//! * [`chains`] — MCD by descent in ACCP monoids and the staged
//!   construction of a set with no MCD.
//! * [`rank2`] — the rank-2 monoid that is atomic but not 2-MCD.

pub mod budget;
pub mod chains;
mod exec;
pub mod grams;
pub mod oracle;
pub mod primes;
pub mod rank2;
pub mod rat;
pub mod spec;
pub mod two_prime;

pub use budget::DEFAULT_NODE_CAP;
pub use rat::{Rat, SignedRat};

use serde::Serialize;

/// Three-valued answer for questions decided relative to a truncation.
///
/// `Unknown` always carries the truncation index that limited the answer;
/// it is never conflated with `False`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "answer")]
pub enum ThreeVal {
    True,
    False,
    Unknown { truncation: usize },
}

impl ThreeVal {
    pub fn is_true(self) -> bool {
        matches!(self, ThreeVal::True)
    }

    pub fn is_false(self) -> bool {
        matches!(self, ThreeVal::False)
    }
}

#[doc(hidden)]
pub use exec::bench_support;

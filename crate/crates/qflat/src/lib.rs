//! Exact enumeration of primitive positive definite maximal integer-valued
//! quadratic forms with bounded class number.
//!
//! The crate is organized around the pipeline that drives the enumeration:
//!
//! - [`arith`] — exact rationals, Bernoulli numbers, special values of zeta
//!   and quadratic Dirichlet L-functions, certified real interval bounds.
//! - [`local`] — p-adic squareclasses, Hilbert symbols, standard and GHY
//!   local invariants and the translation between them.
//! - [`space`] — rational quadratic spaces, global invariant profiles, the
//!   product formula, and constructive space assembly from local data.
//! - [`lattice`] — integer-valued forms and lattices: reduction, short
//!   vectors, automorphisms, isometry, and maximalization.
//! - [`mass`] — the exact mass formula for maximal lattices, eligibility
//!   bounds, and enumeration of eligible characters and local mass types.
//! - [`genus`] — Kneser p-neighbors and mass-certified genus traversal.
//! - [`pipeline`] — the end-to-end enumeration, rank scan, and table output.
//!
//! Run `cargo run --release --bin qflat -- scan --bound 1` for the headline
//! enumeration, or see the `examples/` directory for per-capability demos.

pub mod arith;
pub mod error;
pub mod genus;
pub mod lattice;
pub mod local;
pub mod mass;
pub mod pipeline;
pub mod space;

pub use error::{Error, Result};

/// Exact arbitrary-precision rational, the currency of all mass computations.
pub type Rational = num::BigRational;
/// Arbitrary-precision integer.
pub type Int = num::BigInt;

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

pub(crate) fn rat_int(n: i64) -> Rational {
    Rational::from(Int::from(n))
}

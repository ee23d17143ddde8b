//! Certified canonical heights for the maps z^d + c over Q.
//!
//! The crate computes canonical heights and their per-place decompositions
//! as certified enclosures, classifies reduction types and preperiodic
//! points (with re-checkable witnesses or wandering certificates), evaluates
//! the explicit lower bounds on the height of wandering points, and runs
//! exhaustive minimal-height surveys with a completeness cutoff.
//!
//! Layering, bottom up:
//!
//! - [`dyadic`] / [`interval`]: arbitrary-precision dyadic floats with
//!   directed rounding, and certified intervals (incl. ln, sqrt).
//! - [`rational`] / [`primes`] / [`padic`]: exact rationals, places of Q,
//!   valuations, naive heights, factorization, truncated p-adic orbits.
//! - [`dynamics`]: exact orbits of z^d + c, basin tests, preperiodicity
//!   decisions with certificates.
//! - [`local`] / [`global`]: local canonical heights at every place and the
//!   global height to prescribed enclosure width.
//! - [`families`] / [`bounds`] / [`survey`]: the explicit preperiodic
//!   families and integer classification, the lower-bound constants and
//!   point verdicts, and the minimal-height survey machinery.
//! - [`report`]: schema-stable serializable views used by the CLI and the
//!   browser demo.

pub mod bounds;
pub mod dyadic;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod global;
pub mod interval;
pub mod local;
pub mod padic;
pub mod primes;
pub mod rational;
pub mod report;
pub mod survey;

pub use error::{Error, Result};
pub use interval::CertInterval;
pub use rational::{Place, Rational};

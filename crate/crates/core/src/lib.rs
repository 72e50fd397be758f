//! Walsh spectra, almost-bent classification, subspace intersection profiles
//! and Gold-exponent characterizations of power maps `x -> x^d` on GF(2^m).
//!
//! Every module is pure: inputs are immutable and results are deterministic.
//! Heavy scans (coordinate spectra, codimension-2 cells) run on the rayon
//! global pool and are merged in a fixed order.

mod arith;
pub mod error;
pub mod field;
pub mod geometry;
pub mod goldtest;
pub mod sequence;
pub mod spectrum;

pub use arith::{binomial_is_odd, gcd};
pub use error::{Error, Result};
pub use field::{build_field, FieldElement, FieldSpec};
pub use geometry::{IntersectionProfile, SupportSet};
pub use goldtest::{CyclicBitVector, ExponentCoset, WitnessPath, WitnessResult};
pub use sequence::PeriodicSequence;
pub use spectrum::{AbReport, TruthTable, WalshSpectrum};

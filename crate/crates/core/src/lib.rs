//! Homogenized surface tension of periodic two-phase Ising bond systems.
//!
//! The crate computes the effective surface tension of a periodic bond field
//! by dual-lattice shortest paths, evaluates the optimal bounds for mixtures
//! of two weights, builds microgeometries that attain them, and draws the
//! corresponding Wulff shapes. A brute-force spin oracle checks the path
//! formulation against the ferromagnetic energy on small windows.
//!
//! Everything numeric is generic over [`Scalar`] (exact types included) or
//! [`Real`] (floating point); the aliases below fix the common choices.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod homogenize;
pub mod lattice;
pub mod microgeometry;
pub mod scalar;
mod shortest;
pub mod spin_oracle;
pub mod wulff;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub use num_rational::Rational64;

/// Bond field with double-precision weights.
pub type BondField64 = lattice::BondField<f64>;
/// Bond field with single-precision weights.
pub type BondField32 = lattice::BondField<f32>;
/// Bond field with exact rational weights.
pub type ExactBondField = lattice::BondField<Rational64>;
/// Double-precision surface tension profile.
pub type Profile64 = homogenize::SurfaceTensionProfile<f64>;
/// Double-precision Wulff shape.
pub type Wulff64 = wulff::WulffPolygon<f64>;

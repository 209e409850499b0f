//! Moments of lattice-point counts for O_K-module lattices over ℚ, quadratic
//! and cyclotomic fields.
//!
//! The crate is organised bottom-up:
//! - [`numberfield`]: exact field arithmetic, embeddings, HNF ideals, units;
//! - [`heights`]: Weil/Mahler heights, projective and Grassmannian heights;
//! - [`moments`]: Poisson main terms, Stirling numbers, ball volumes, Rogers' error;
//! - [`bounds`]: explicit error constants, unit and ideal sums, Dedekind zeta intervals;
//! - [`oracle`]: Monte Carlo, cubature and enumeration cross-checks.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod heights;
pub mod moments;
pub mod numberfield;
pub mod oracle;
pub mod quad;

pub use error::{Error, Result};
pub use numberfield::{FieldElement, FieldKind, FracIdeal, NumberField};

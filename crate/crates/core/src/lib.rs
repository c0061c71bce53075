//! Exact closed forms for mean squares of Dirichlet L-functions at positive
//! integers, with a high-precision numeric oracle to check them against.
//!
//! The pipeline is bottom-up:
//! [`exact_arith`] and [`arith_fn`] supply rational building blocks,
//! [`symbolic`] holds Jordan-totient combinations, [`sin_sums`] expands
//! reciprocal sine power sums, and [`mean_square`] assembles the mean-square
//! formulas. [`numeric_oracle`] computes the same quantities by brute force.

pub mod arith_fn;
pub mod error;
pub mod exact_arith;
pub mod highprec;
pub mod mean_square;
pub mod numeric_oracle;
pub mod sin_sums;
pub mod symbolic;

pub use error::{Error, Result};
pub use exact_arith::Rational;
pub use symbolic::{ClosedForm, Format, JordanCombo, KLaurent, Render};

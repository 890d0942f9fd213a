//! Computable Lumer/Hardy norms on plane domains and executable checks of
//! the `√2` Riesz inequality for harmonic conjugates.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_spectral;
pub mod cli;
pub mod conformal_atlas;
pub mod conjugate_field;
pub mod error;
pub mod grid;
pub mod lumer_majorant;
pub mod riesz_engine;

pub use error::{Error, Result};

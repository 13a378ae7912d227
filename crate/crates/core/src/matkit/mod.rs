//! Dense matrix kernels and the exponential-map operator calculus.

mod expm;
mod lie;
mod logm;
mod matrix;
mod norms;
mod sparse;

pub use expm::{mat_exp, THETA_13};
pub use lie::{
    ad_power, bernoulli, bernoulli_weight, commutator, ddexp, dexp, dexp_inv, BERNOULLI_TABLE_MAX,
};
pub(crate) use lie::{commutator_unchecked, factorial};
pub use logm::{log_norm_bound, mat_log};
pub use matrix::Matrix;
pub use norms::{frobenius_norm, spectral_norm};
pub use sparse::CsrMatrix;

use crate::error::{Error, Result};

/// Truncation rule for the infinite operator series.
///
/// A series stops after `max_terms` terms or once a term's Frobenius norm drops
/// below `abs_tol`, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub max_terms: usize,
    pub abs_tol: f64,
}

impl SeriesConfig {
    pub fn new(max_terms: usize, abs_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Config("series needs at least one term".into()));
        }
        if !(abs_tol >= 0.0) {
            return Err(Error::Config(format!("abs_tol must be nonnegative, got {abs_tol}")));
        }
        Ok(Self { max_terms, abs_tol })
    }
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            max_terms: 20,
            abs_tol: 1e-14,
        }
    }
}

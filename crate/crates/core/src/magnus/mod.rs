//! Truncated stochastic Magnus expansion.
//!
//! The logarithm `Y_t` of the solution `X_t = e^{Y_t}` of
//! `dX = B X dt + Σ_j A^(j) X dW^j` is expanded as `Y = Y1 + Y2 + Y3 + …`,
//! where `Yn` collects every term of total order `n` in the diffusion and
//! drift coefficients. Three constructions are provided:
//!
//! - closed forms for constant coefficients ([`terms_const`]) and for the
//!   upper-triangular benchmark ([`terms_triangular`]), where every
//!   stochastic integral reduces to Lebesgue integrals of the path;
//! - explicit first- and second-order iterated integrals for arbitrary
//!   time-dependent coefficients and any number of drivers ([`terms_general`]);
//! - the Bernoulli-weighted recursion up to third order ([`recursion_terms`]).
//!
//! [`assemble`] exponentiates the partial sums at the requested grid times.

mod closed;
mod general;
mod recursion;

use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matkit::{frobenius_norm, mat_exp, Matrix, SeriesConfig};
use crate::randpath::TimeGrid;

pub use closed::{terms_const, terms_const_at, terms_triangular};
pub use general::terms_general;
pub use recursion::recursion_terms;

/// Deterministic time-dependent coefficient.
pub type CoefficientFn = Arc<dyn Fn(f64) -> Matrix + Send + Sync>;

#[derive(Clone)]
pub enum Coefficient {
    Constant(Matrix),
    TimeDependent(CoefficientFn),
}

impl Coefficient {
    pub fn time_dependent(f: impl Fn(f64) -> Matrix + Send + Sync + 'static) -> Self {
        Coefficient::TimeDependent(Arc::new(f))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }

    pub fn at(&self, t: f64) -> Cow<'_, Matrix> {
        match self {
            Coefficient::Constant(m) => Cow::Borrowed(m),
            Coefficient::TimeDependent(f) => Cow::Owned(f(t)),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            Coefficient::TimeDependent(_) => f.write_str("TimeDependent(..)"),
        }
    }
}

/// `dX = B_t X dt + Σ_j A^(j)_t X dW^j`, `X_0 = I`.
#[derive(Clone, Debug)]
pub struct LinearSde {
    dim: usize,
    drift: Coefficient,
    diffusion: Vec<Coefficient>,
}

impl LinearSde {
    pub fn new(dim: usize, drift: Coefficient, diffusion: Vec<Coefficient>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("SDE dimension must be positive".into()));
        }
        if diffusion.is_empty() {
            return Err(Error::Config("SDE needs at least one Brownian driver".into()));
        }
        let sde = Self {
            dim,
            drift,
            diffusion,
        };
        // time-dependent callables are checked at the origin, constants once and for all
        sde.drift_at(0.0)?;
        for j in 0..sde.q() {
            sde.diffusion_at(j, 0.0)?;
        }
        Ok(sde)
    }

    /// Constant drift `B` and a single constant diffusion `A`.
    pub fn constant(drift: Matrix, diffusion: Matrix) -> Result<Self> {
        let dim = drift.dim();
        Self::new(
            dim,
            Coefficient::Constant(drift),
            vec![Coefficient::Constant(diffusion)],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of Brownian drivers.
    pub fn q(&self) -> usize {
        self.diffusion.len()
    }

    pub fn drift(&self) -> &Coefficient {
        &self.drift
    }

    pub fn diffusion(&self, j: usize) -> &Coefficient {
        &self.diffusion[j]
    }

    /// Time-independence of `[B, A^(1), …, A^(q)]`.
    pub fn constant_flags(&self) -> Vec<bool> {
        std::iter::once(&self.drift)
            .chain(&self.diffusion)
            .map(Coefficient::is_constant)
            .collect()
    }

    pub fn is_constant(&self) -> bool {
        self.constant_flags().into_iter().all(|c| c)
    }

    pub fn drift_at(&self, t: f64) -> Result<Cow<'_, Matrix>> {
        self.checked(self.drift.at(t))
    }

    pub fn diffusion_at(&self, j: usize, t: f64) -> Result<Cow<'_, Matrix>> {
        self.checked(self.diffusion[j].at(t))
    }

    fn checked<'a>(&self, m: Cow<'a, Matrix>) -> Result<Cow<'a, Matrix>> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: m.dim(),
            });
        }
        m.ensure_finite()?;
        Ok(m)
    }
}

/// Truncation order, grid and output times of a Magnus approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnusConfig {
    pub order: usize,
    pub grid: TimeGrid,
    pub series: SeriesConfig,
    /// Grid indices at which the solution is assembled.
    pub output_times: Vec<usize>,
}

impl MagnusConfig {
    pub fn new(order: usize, grid: TimeGrid, output_times: Vec<usize>) -> Result<Self> {
        if !(1..=3).contains(&order) {
            return Err(Error::Config(format!("Magnus order must be 1, 2 or 3, got {order}")));
        }
        if let Some(&k) = output_times.iter().find(|&&k| k > grid.n_steps()) {
            return Err(Error::Config(format!("output index {k} is off the grid")));
        }
        Ok(Self {
            order,
            grid,
            series: SeriesConfig::default(),
            output_times,
        })
    }

    /// Every grid point, `t_0` included.
    pub fn all_times(order: usize, grid: TimeGrid) -> Result<Self> {
        Self::new(order, grid, (0..=grid.n_steps()).collect())
    }
}

/// The terms `Y1..Yn` at a set of grid indices.
#[derive(Debug, Clone)]
pub struct MagnusTerms {
    order: usize,
    grid: TimeGrid,
    indices: Vec<usize>,
    // terms[n - 1][i] is Y_n at grid index indices[i]
    terms: Vec<Vec<Matrix>>,
}

impl MagnusTerms {
    pub(crate) fn new(grid: TimeGrid, indices: Vec<usize>, terms: Vec<Vec<Matrix>>) -> Self {
        debug_assert!(terms.iter().all(|t| t.len() == indices.len()));
        Self {
            order: terms.len(),
            grid,
            indices,
            terms,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Grid indices covered, increasing.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    fn position(&self, k: usize) -> Option<usize> {
        self.indices.binary_search(&k).ok()
    }

    /// `Y_n` at grid index `k`, if computed.
    pub fn term(&self, n: usize, k: usize) -> Option<&Matrix> {
        let pos = self.position(k)?;
        self.terms.get(n.checked_sub(1)?).map(|t| &t[pos])
    }

    /// `Y1 + … + Y_order` at grid index `k`.
    pub fn logarithm(&self, order: usize, k: usize) -> Result<Matrix> {
        if order == 0 || order > self.order {
            return Err(Error::Config(format!(
                "terms cover order {}, requested {order}",
                self.order
            )));
        }
        let pos = self
            .position(k)
            .ok_or_else(|| Error::Config(format!("grid index {k} not covered by the terms")))?;
        let mut acc = self.terms[0][pos].clone();
        for n in 1..order {
            acc += &self.terms[n][pos];
        }
        Ok(acc)
    }
}

/// `X^(n)_{t_k} = exp(Y1 + … + Yn)` at each of `cfg.output_times`.
pub fn assemble(terms: &MagnusTerms, cfg: &MagnusConfig) -> Result<Vec<Matrix>> {
    if cfg.order > terms.order() {
        return Err(Error::Config(format!(
            "terms cover order {}, configuration asks for {}",
            terms.order(),
            cfg.order
        )));
    }
    cfg.output_times
        .par_iter()
        .map(|&k| mat_exp(&terms.logarithm(cfg.order, k)?))
        .collect()
}

/// Radius of the neighbourhood of the identity where the expansion is guaranteed.
pub const TAU_THRESHOLD: f64 = 1.0 - 0.043_213_918_263_772_25; // 1 - e^{-π}

/// First exit of a trajectory from `‖X - I‖_F < 1 - e^{-π}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingTime {
    Exit(f64),
    /// No exit up to the end of the horizon.
    Censored(f64),
}

impl StoppingTime {
    pub fn exited_by(&self, t: f64) -> bool {
        matches!(*self, StoppingTime::Exit(tau) if tau <= t)
    }
}

/// First grid time at which `‖X_t - I‖_F ≥ 1 - e^{-π}`.
pub fn tau_monitor(x_path: &[Matrix], grid: &TimeGrid) -> Result<StoppingTime> {
    if x_path.len() != grid.n_steps() + 1 {
        return Err(Error::LengthMismatch {
            expected: grid.n_steps() + 1,
            got: x_path.len(),
        });
    }
    let ident = Matrix::identity(x_path[0].dim());
    for (k, x) in x_path.iter().enumerate() {
        if frobenius_norm(&(x - &ident)) >= TAU_THRESHOLD {
            return Ok(StoppingTime::Exit(grid.time(k)));
        }
    }
    Ok(StoppingTime::Censored(grid.t_final()))
}

#[cfg(test)]
mod tests {
    use super::*;

    use std::f64::consts::PI;

    #[test]
    fn threshold_constant() {
        assert!((TAU_THRESHOLD - (1.0 - (-PI).exp())).abs() < 1e-16);
        assert!((TAU_THRESHOLD - 0.95679).abs() < 1e-5);
    }

    #[test]
    fn tau_identity_path_is_censored() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let path = vec![Matrix::identity(2); 11];
        assert_eq!(tau_monitor(&path, &grid).unwrap(), StoppingTime::Censored(1.0));
    }

    #[test]
    fn tau_scalar_exponential() {
        // |e^t - 1| reaches 1 - e^{-π} at t = log(2 - e^{-π})
        let n = 100_000;
        let grid = TimeGrid::new(1.0, n).unwrap();
        let path: Vec<Matrix> = grid
            .times()
            .map(|t| Matrix::from_diag(&[t.exp(), 1.0]))
            .collect();
        let root = (2.0 - (-PI).exp()).ln();
        assert!((root - 0.671_30).abs() < 1e-5);
        match tau_monitor(&path, &grid).unwrap() {
            StoppingTime::Exit(t) => assert!((t - root).abs() <= grid.dt()),
            other => panic!("expected exit, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        assert!(MagnusConfig::new(4, grid, vec![]).is_err());
        assert!(MagnusConfig::new(2, grid, vec![11]).is_err());
        assert!(MagnusConfig::new(3, grid, vec![0, 10]).is_ok());
    }

    #[test]
    fn sde_rejects_wrong_dimension() {
        let bad = LinearSde::new(
            2,
            Coefficient::Constant(Matrix::zeros(2)),
            vec![Coefficient::time_dependent(|_| Matrix::zeros(3))],
        );
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
        let sde = LinearSde::new(
            2,
            Coefficient::Constant(Matrix::zeros(2)),
            vec![Coefficient::time_dependent(|t| Matrix::from_diag(&[t, 1.0]))],
        )
        .unwrap();
        assert_eq!(sde.constant_flags(), vec![true, false]);
        assert!(!sde.is_constant());
    }
}

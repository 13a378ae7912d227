//! Method of lines for the one-dimensional stochastic Cauchy problem
//!
//! ```text
//! du = (a/2 u_xx + b u_x + c u) dt + (σ u_x + γ u) dW
//! ```
//!
//! on a bounded interval with homogeneous Dirichlet data. Centred second
//! differences and backward first differences turn it into a linear matrix
//! SDE `dX = A^d X dt + B^d X dW` whose fundamental matrix is then handled by
//! the Magnus and Euler solvers.

use std::ops::Range;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::error::{Error, Result};
use crate::magnus::{
    assemble, recursion_terms, terms_const, terms_general, Coefficient, LinearSde, MagnusConfig,
    MagnusTerms,
};
use crate::matkit::{frobenius_norm, Matrix};
use crate::randpath::{path_integrals, BrownianPath};
use crate::refsolve::{euler_maruyama, heat_variance, EulerConfig};

/// A real coefficient `f(t, x)` of the SPDE.
#[derive(Clone)]
pub enum Field {
    Constant(f64),
    /// `Σ_k c_k x^k`, time-independent.
    Polynomial(Vec<f64>),
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Field {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            Field::Constant(v) => *v,
            Field::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            Field::Custom(f) => f(t, x),
        }
    }

    pub fn is_time_independent(&self) -> bool {
        !matches!(self, Field::Custom(_))
    }
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Constant(v) => write!(f, "Constant({v})"),
            Field::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            Field::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Equidistant grid `x_i = lo + i h`, `i = 0..=d+1`, with `d` interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    lo: f64,
    hi: f64,
    d: usize,
}

impl Mesh {
    pub fn new(lo: f64, hi: f64, d: usize) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config(format!("invalid domain [{lo}, {hi}]")));
        }
        if d < 2 {
            return Err(Error::Config(format!("need at least 2 interior points, got {d}")));
        }
        Ok(Self { lo, hi, d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / (self.d + 1) as f64
    }

    /// `x_i`, including the two boundary points `i = 0` and `i = d + 1`.
    pub fn point(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.h()
    }

    /// The `d` interior points.
    pub fn interior(&self) -> Vec<f64> {
        (1..=self.d).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SpdeProblem {
    pub a: Field,
    pub b: Field,
    pub c: Field,
    pub sigma: Field,
    pub gamma: Field,
    pub mesh: Mesh,
}

impl SpdeProblem {
    /// `du = a/2 u_xx dt + σ u_x dW`.
    pub fn heat(a: f64, sigma: f64, mesh: Mesh) -> Self {
        Self {
            a: Field::Constant(a),
            b: Field::Constant(0.0),
            c: Field::Constant(0.0),
            sigma: Field::Constant(sigma),
            gamma: Field::Constant(0.0),
            mesh,
        }
    }

    pub fn is_time_independent(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.sigma, &self.gamma]
            .iter()
            .all(|f| f.is_time_independent())
    }

    /// Reads a problem from a TOML file, see [`ProblemSpec`].
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: ProblemSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.build()
    }

    /// Heat-equation parameters `(a, σ)` when the problem is of that form.
    pub fn heat_parameters(&self) -> Option<(f64, f64)> {
        match (&self.a, &self.b, &self.c, &self.sigma, &self.gamma) {
            (
                Field::Constant(a),
                Field::Constant(b),
                Field::Constant(c),
                Field::Constant(s),
                Field::Constant(g),
            ) if *b == 0.0 && *c == 0.0 && *g == 0.0 => Some((*a, *s)),
            _ => None,
        }
    }
}

/// Built-in coefficient families available from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Constant { value: f64 },
    Polynomial { coeffs: Vec<f64> },
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Constant { value: 0.0 }
    }
}

impl From<&FieldSpec> for Field {
    fn from(spec: &FieldSpec) -> Self {
        match spec {
            FieldSpec::Constant { value } => Field::Constant(*value),
            FieldSpec::Polynomial { coeffs } => Field::Polynomial(coeffs.clone()),
        }
    }
}

/// Serialisable problem description.
///
/// ```toml
/// domain = [-2.0, 2.0]
/// d = 100
/// a = { kind = "constant", value = 0.2 }
/// sigma = { kind = "polynomial", coeffs = [0.15, 0.0, -0.01] }
/// ```
///
/// Omitted coefficients are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub domain: [f64; 2],
    pub d: usize,
    pub a: FieldSpec,
    #[serde(default)]
    pub b: FieldSpec,
    #[serde(default)]
    pub c: FieldSpec,
    #[serde(default)]
    pub sigma: FieldSpec,
    #[serde(default)]
    pub gamma: FieldSpec,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<SpdeProblem> {
        Ok(SpdeProblem {
            a: (&self.a).into(),
            b: (&self.b).into(),
            c: (&self.c).into(),
            sigma: (&self.sigma).into(),
            gamma: (&self.gamma).into(),
            mesh: Mesh::new(self.domain[0], self.domain[1], self.d)?,
        })
    }
}

/// The matrix SDE produced by [`discretize`].
#[derive(Debug, Clone)]
pub struct DiscretizedSystem {
    pub sde: LinearSde,
    pub mesh: Mesh,
}

impl DiscretizedSystem {
    /// `(A^d, B^d)` at time `t`: drift and diffusion generators.
    pub fn generators(&self, t: f64) -> Result<(Matrix, Matrix)> {
        Ok((
            self.sde.drift_at(t)?.into_owned(),
            self.sde.diffusion_at(0, t)?.into_owned(),
        ))
    }
}

fn drift_matrix(p: &SpdeProblem, t: f64) -> Matrix {
    let mesh = p.mesh;
    let (d, h) = (mesh.d(), mesh.h());
    let mut m = Matrix::zeros(d);
    for i in 0..d {
        let x = mesh.point(i + 1);
        let (a, b, c) = (p.a.eval(t, x), p.b.eval(t, x), p.c.eval(t, x));
        if i > 0 {
            m[(i, i - 1)] = a / (2.0 * h * h) - b / h;
        }
        m[(i, i)] = -a / (h * h) + b / h + c;
        if i + 1 < d {
            m[(i, i + 1)] = a / (2.0 * h * h);
        }
    }
    m
}

fn diffusion_matrix(p: &SpdeProblem, t: f64) -> Matrix {
    let mesh = p.mesh;
    let (d, h) = (mesh.d(), mesh.h());
    let mut m = Matrix::zeros(d);
    for i in 0..d {
        let x = mesh.point(i + 1);
        let (s, g) = (p.sigma.eval(t, x), p.gamma.eval(t, x));
        if i > 0 {
            m[(i, i - 1)] = -s / h;
        }
        m[(i, i)] = s / h + g;
    }
    m
}

/// Finite-difference generators with the Dirichlet closure `u_0 = u_{d+1} = 0`.
pub fn discretize(problem: &SpdeProblem) -> Result<DiscretizedSystem> {
    let (drift, diffusion) = if problem.is_time_independent() {
        (
            Coefficient::Constant(drift_matrix(problem, 0.0)),
            Coefficient::Constant(diffusion_matrix(problem, 0.0)),
        )
    } else {
        let (p1, p2) = (problem.clone(), problem.clone());
        (
            Coefficient::time_dependent(move |t| drift_matrix(&p1, t)),
            Coefficient::time_dependent(move |t| diffusion_matrix(&p2, t)),
        )
    };
    let sde = LinearSde::new(problem.mesh.d(), drift, vec![diffusion])?;
    Ok(DiscretizedSystem {
        sde,
        mesh: problem.mesh,
    })
}

/// `P(lo < N(mean, sd²) < hi)` without cancellation in either tail.
fn gaussian_mass(lo: f64, hi: f64, mean: f64, sd: f64) -> f64 {
    let z = |v: f64| (v - mean) / (sd * std::f64::consts::SQRT_2);
    let (zl, zh) = (z(lo), z(hi));
    if zl >= 0.0 {
        0.5 * (erfc(zl) - erfc(zh))
    } else if zh <= 0.0 {
        0.5 * (erfc(-zh) - erfc(-zl))
    } else {
        1.0 - 0.5 * (erfc(-zl) + erfc(zh))
    }
}

/// Cell integrals of the heat kernel: entry `(i, j)` is the mass that the
/// Gaussian started at `x_i` puts on the dual cell `[x_j - h/2, x_j + h/2]`.
pub fn fundamental_integral_matrix(a: f64, sigma: f64, t: f64, w_t: f64, mesh: &Mesh) -> Result<Matrix> {
    let sd = heat_variance(a, sigma, t)?.sqrt();
    let h = mesh.h();
    let d = mesh.d();
    let xs = mesh.interior();
    Ok(Matrix::from_fn(d, |i, j| {
        let mean = xs[i] + sigma * w_t;
        gaussian_mass(xs[j] - 0.5 * h, xs[j] + 0.5 * h, mean, sd)
    }))
}

/// Rows used by the central-κ error, as a 0-based range.
pub fn central_rows(d: usize, kappa: usize) -> Result<Range<usize>> {
    if kappa == 0 || kappa > d {
        return Err(Error::Config(format!("kappa must lie in 1..={d}, got {kappa}")));
    }
    let start = (d - kappa) / 2;
    Ok(start..start + kappa)
}

/// `κ = ⌊d/2⌋`.
pub fn default_kappa(d: usize) -> usize {
    d / 2
}

/// Relative Frobenius error restricted to the central `κ` rows.
pub fn spde_error(x_app: &Matrix, i_exact: &Matrix, kappa: usize) -> Result<f64> {
    x_app.ensure_same_dim(i_exact)?;
    let d = x_app.dim();
    let rows = central_rows(d, kappa)?;
    let (mut num, mut den) = (0.0, 0.0);
    for i in rows {
        for (x, e) in x_app.row(i).iter().zip(i_exact.row(i)) {
            num += (x - e) * (x - e);
            den += e * e;
        }
    }
    if den == 0.0 {
        return Err(Error::Numeric("exact block is zero".into()));
    }
    Ok((num / den).sqrt())
}

/// Time integrator for [`solve_spde`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdeMethod {
    Euler,
    Magnus(usize),
}

/// Magnus terms for a discretised system, choosing the cheapest valid construction.
pub fn system_terms(system: &DiscretizedSystem, path: &BrownianPath, order: usize) -> Result<MagnusTerms> {
    if system.sde.is_constant() {
        let (drift, diffusion) = system.generators(0.0)?;
        terms_const(&diffusion, &drift, path, &path_integrals(path))
    } else if order <= 2 {
        terms_general(&system.sde, path, order)
    } else {
        recursion_terms(&system.sde, path, order)
    }
}

/// Discrete solution `u_k = X_{t_k} u_0` at every point of the path's grid.
pub fn solve_spde(
    problem: &SpdeProblem,
    initial: &[f64],
    method: SpdeMethod,
    path: &BrownianPath,
) -> Result<Vec<Vec<f64>>> {
    let d = problem.mesh.d();
    if initial.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: initial.len(),
        });
    }
    let system = discretize(problem)?;
    let grid = *path.grid();
    let all: Vec<usize> = (0..=grid.n_steps()).collect();
    let xs = match method {
        SpdeMethod::Euler => euler_maruyama(&system.sde, path, &EulerConfig::new(grid, all)?)?,
        SpdeMethod::Magnus(order) => {
            let terms = system_terms(&system, path, order)?;
            assemble(&terms, &MagnusConfig::new(order, grid, all)?)?
        }
    };
    xs.iter().map(|x| x.mul_vec(initial)).collect()
}

/// Norm used when comparing two discrete solutions.
pub fn relative_difference(a: &Matrix, b: &Matrix) -> f64 {
    frobenius_norm(&(a - b)) / frobenius_norm(b)
}

//! Reference solutions for the error measurements: the Euler–Maruyama scheme
//! on a fine grid, the explicitly solvable benchmarks, and the Gaussian
//! fundamental solution of the stochastic heat equation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::magnus::LinearSde;
use crate::matkit::{mat_exp, CsrMatrix, Matrix};
use crate::randpath::{BrownianPath, TimeGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct EulerConfig {
    pub grid: TimeGrid,
    pub output_times: Vec<usize>,
}

impl EulerConfig {
    pub fn new(grid: TimeGrid, output_times: Vec<usize>) -> Result<Self> {
        if output_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("Euler output times must be strictly increasing".into()));
        }
        if let Some(&k) = output_times.iter().find(|&&k| k > grid.n_steps()) {
            return Err(Error::Config(format!("output index {k} is off the grid")));
        }
        Ok(Self { grid, output_times })
    }
}

/// `X_{k+1} = X_k + B X_k dt + Σ_j A^j X_k ΔW^j_k` from `X_0 = I`, recorded at `cfg.output_times`.
///
/// Coefficients are taken at the left end of each step. Constant coefficients
/// are converted to sparse form once, so banded systems step in `O(nnz · d)`;
/// time-dependent ones are re-evaluated and applied densely.
pub fn euler_maruyama(sde: &LinearSde, path: &BrownianPath, cfg: &EulerConfig) -> Result<Vec<Matrix>> {
    if *path.grid() != cfg.grid {
        return Err(Error::Config("path and Euler grids differ".into()));
    }
    if path.channels() != sde.q() {
        return Err(Error::Config(format!(
            "SDE has {} drivers but the path has {} channels",
            sde.q(),
            path.channels()
        )));
    }
    let d = sde.dim();
    let dt = cfg.grid.dt();
    let q = sde.q();

    let Some(&last) = cfg.output_times.last() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(cfg.output_times.len());
    let mut next_out = cfg.output_times.iter().peekable();
    let mut x = Matrix::identity(d);
    let mut y = Matrix::zeros(d);

    if sde.is_constant() {
        // C = I + B dt and the diffusion operators never change: convert to sparse once
        let mut c = sde.drift_at(0.0)?.scaled(dt);
        c += &Matrix::identity(d);
        let c = CsrMatrix::from_dense(&c);
        let a: Vec<CsrMatrix> = (0..q)
            .map(|j| Ok(CsrMatrix::from_dense(&*sde.diffusion_at(j, 0.0)?)))
            .collect::<Result<_>>()?;
        for k in 0..=last {
            if next_out.next_if(|&&i| i == k).is_some() {
                out.push(x.clone());
            }
            if k == last {
                break;
            }
            y.as_mut_slice().fill(0.0);
            c.mul_add_into(1.0, &x, &mut y);
            for (j, aj) in a.iter().enumerate() {
                aj.mul_add_into(path.increment(j, k), &x, &mut y);
            }
            std::mem::swap(&mut x, &mut y);
        }
    } else {
        let mut tmp = Matrix::zeros(d);
        for k in 0..=last {
            if next_out.next_if(|&&i| i == k).is_some() {
                out.push(x.clone());
            }
            if k == last {
                break;
            }
            let t = cfg.grid.time(k);
            y.as_mut_slice().copy_from_slice(x.as_slice());
            sde.drift_at(t)?.matmul_into(&x, &mut tmp);
            y.axpy(dt, &tmp);
            for j in 0..q {
                sde.diffusion_at(j, t)?.matmul_into(&x, &mut tmp);
                y.axpy(path.increment(j, k), &tmp);
            }
            std::mem::swap(&mut x, &mut y);
        }
    }
    if let Some(bad) = out.iter().find(|m| !m.is_finite()) {
        bad.ensure_finite()?;
    }
    Ok(out)
}

/// `X_t = exp(A W_t - A² t / 2)` at the given grid indices: the solution for `B = 0`, constant `A`.
pub fn exact_const_diffusion(a: &Matrix, path: &BrownianPath, times: &[usize]) -> Result<Vec<Matrix>> {
    if path.channels() != 1 {
        return Err(Error::Unsupported("explicit solution needs one driver".into()));
    }
    let a2 = a * a;
    times
        .iter()
        .map(|&k| {
            if k > path.grid().n_steps() {
                return Err(Error::Config(format!("index {k} is off the grid")));
            }
            let mut y = a.scaled(path.value(0, k));
            y.axpy(-0.5 * path.grid().time(k), &a2);
            mat_exp(&y)
        })
        .collect()
}

/// Itô solution of `dX = A_t X dW` for `A_t = [[α(t), β(t)], [0, γ(t)]]` at every grid point.
///
/// The diagonal is a pair of stochastic exponentials and the corner follows by
/// variation of constants:
///
/// ```text
/// X11 = exp(∫α dW - ½∫α² ds),  X22 = exp(∫γ dW - ½∫γ² ds)
/// X12 = X11 (∫β R dW - ∫αβ R ds),  R = X22 / X11
/// ```
///
/// All integrals are left-point sums on the path's grid.
pub fn exact_upper_triangular(
    alpha: impl Fn(f64) -> f64,
    beta: impl Fn(f64) -> f64,
    gamma: impl Fn(f64) -> f64,
    path: &BrownianPath,
) -> Result<Vec<Matrix>> {
    if path.channels() != 1 {
        return Err(Error::Unsupported("explicit solution needs one driver".into()));
    }
    let grid = path.grid();
    let dt = grid.dt();
    let (mut l11, mut l22, mut corner) = (0.0f64, 0.0f64, 0.0);
    let mut out = Vec::with_capacity(grid.n_steps() + 1);
    out.push(Matrix::identity(2));
    for k in 0..grid.n_steps() {
        let t = grid.time(k);
        let dw = path.increment(0, k);
        let (al, be, ga) = (alpha(t), beta(t), gamma(t));
        let r = (l22 - l11).exp();
        corner += be * r * dw - al * be * r * dt;
        l11 += al * dw - 0.5 * al * al * dt;
        l22 += ga * dw - 0.5 * ga * ga * dt;
        let x11 = l11.exp();
        out.push(Matrix::from_row_major(2, vec![x11, x11 * corner, 0.0, l22.exp()])?);
    }
    if let Some(bad) = out.iter().find(|m| !m.is_finite()) {
        bad.ensure_finite()?;
    }
    Ok(out)
}

/// Solution for `A_t = [[2, t], [0, -1]]`, `B = 0` at every grid point.
pub fn exact_triangular(path: &BrownianPath) -> Result<Vec<Matrix>> {
    exact_upper_triangular(|_| 2.0, |t| t, |_| -1.0, path)
}

/// Fundamental solution of `du = a/2 u_xx dt + σ u_x dW`: a Gaussian density
/// in `ξ` with mean `x + σ W_t` and variance `(a - σ²) t`.
pub fn heat_kernel(a: f64, sigma: f64, t: f64, x: f64, xi: f64, w_t: f64) -> Result<f64> {
    let var = heat_variance(a, sigma, t)?;
    let z = xi - x - sigma * w_t;
    Ok((-z * z / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
}

/// `(a - σ²) t`, validated.
pub fn heat_variance(a: f64, sigma: f64, t: f64) -> Result<f64> {
    if !(a > sigma * sigma) {
        return Err(Error::Domain(format!(
            "the heat kernel needs a > σ², got a = {a}, σ = {sigma}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("the heat kernel needs t > 0, got {t}")));
    }
    Ok((a - sigma * sigma) * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnus::Coefficient;
    use crate::matkit::frobenius_norm;
    use crate::randpath::sample_brownian;

    fn zero_path(grid: TimeGrid) -> BrownianPath {
        BrownianPath::from_values(grid, vec![vec![0.0; grid.n_steps() + 1]]).unwrap()
    }

    #[test]
    fn euler_deterministic_drift() {
        let b = Matrix::from_rows(&[[-0.0572262, 0.0493763], [-0.665366, 0.742744]]).unwrap();
        let sde = LinearSde::constant(b.clone(), Matrix::zeros(2)).unwrap();
        let grid = TimeGrid::new(1.0, 10_000).unwrap();
        let cfg = EulerConfig::new(grid, vec![0, 10_000]).unwrap();
        let xs = euler_maruyama(&sde, &zero_path(grid), &cfg).unwrap();
        assert_eq!(xs[0], Matrix::identity(2));
        let exact = mat_exp(&b).unwrap();
        assert!(frobenius_norm(&(&xs[1] - &exact)) / frobenius_norm(&exact) < 1e-3);
    }

    #[test]
    fn euler_time_dependent_matches_manual_loop() {
        let sde = LinearSde::new(
            2,
            Coefficient::time_dependent(|t| Matrix::from_diag(&[t, -t])),
            vec![Coefficient::time_dependent(|t| {
                Matrix::from_rows(&[[0.1, t], [0.0, -0.2]]).unwrap()
            })],
        )
        .unwrap();
        let grid = TimeGrid::new(1.0, 50).unwrap();
        let path = sample_brownian(grid, 1, 4, 0);
        let cfg = EulerConfig::new(grid, vec![50]).unwrap();
        let got = euler_maruyama(&sde, &path, &cfg).unwrap();
        let mut x = Matrix::identity(2);
        for k in 0..50 {
            let t = grid.time(k);
            let b = Matrix::from_diag(&[t, -t]);
            let a = Matrix::from_rows(&[[0.1, t], [0.0, -0.2]]).unwrap();
            let mut step = &x + &(&b * &x).scaled(grid.dt());
            step += &(&a * &x).scaled(path.increment(0, k));
            x = step;
        }
        assert!(frobenius_norm(&(&got[0] - &x)) < 1e-13);
    }

    #[test]
    fn triangular_along_zero_path() {
        let n = 20_000;
        let grid = TimeGrid::new(1.0, n).unwrap();
        let xs = exact_triangular(&zero_path(grid)).unwrap();
        let x = &xs[n];
        let t: f64 = 1.0;
        assert!((x[(0, 0)] - (-2.0 * t).exp()).abs() < 1e-12);
        assert!((x[(1, 1)] - (-0.5 * t).exp()).abs() < 1e-12);
        assert_eq!(x[(1, 0)], 0.0);
        // ∫ s e^{3s/2} ds = e^{3s/2} (2s/3 - 4/9)
        let integral = (1.5 * t).exp() * (2.0 * t / 3.0 - 4.0 / 9.0) + 4.0 / 9.0;
        let corner = -2.0 * (-2.0 * t).exp() * integral;
        assert!((x[(0, 1)] - corner).abs() < 1e-4, "{} vs {corner}", x[(0, 1)]);
    }

    #[test]
    fn heat_kernel_values() {
        let var: f64 = 0.2 - 0.15f64 * 0.15;
        assert!((var - 0.1775).abs() < 1e-15);
        let peak = heat_kernel(0.2, 0.15, 0.5, 0.3, 0.3, 0.0).unwrap();
        assert!((peak - 1.0 / (2.0 * PI * var * 0.5).sqrt()).abs() < 1e-12);
        let left = heat_kernel(0.2, 0.15, 0.5, 0.0, 0.4, 0.0).unwrap();
        let right = heat_kernel(0.2, 0.15, 0.5, 0.4, 0.0, 0.0).unwrap();
        assert_eq!(left, right);
        assert!(heat_kernel(0.02, 0.15, 0.5, 0.0, 0.0, 0.0).is_err());
        assert!(heat_kernel(0.2, 0.15, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn heat_kernel_is_a_density() {
        // composite Simpson over ±8 standard deviations around the mean
        let (a, s, t, x, w) = (0.2, 0.15, 0.7, -0.3, 0.4);
        let sd = heat_variance(a, s, t).unwrap().sqrt();
        let mean = x + s * w;
        let n = 4000;
        let h = 16.0 * sd / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let xi = mean - 8.0 * sd + i as f64 * h;
            let wgt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += wgt * heat_kernel(a, s, t, x, xi, w).unwrap();
        }
        assert!((sum * h / 3.0 - 1.0).abs() < 1e-8);
    }
}

use super::{frobenius_norm, spectral_norm, Matrix, SeriesConfig};
use crate::error::{Error, Result};

/// Principal logarithm by the Mercator series `Σ (-1)^(n+1) (M - I)^n / n`.
///
/// Only defined for `‖M - I‖₂ < 1`; no inverse scaling and squaring is attempted.
/// The series converges geometrically with ratio `‖M - I‖₂`, so callers close to
/// the boundary need a `max_terms` well above the default.
pub fn mat_log(m: &Matrix, cfg: &SeriesConfig) -> Result<Matrix> {
    m.ensure_finite()?;
    let ident = Matrix::identity(m.dim());
    let e = m - &ident;
    let radius = spectral_norm(&e)?;
    if radius >= 1.0 {
        return Err(Error::Domain(format!(
            "mat_log requires ‖M - I‖₂ < 1, got {radius}"
        )));
    }
    let mut acc = e.clone();
    let mut power = e.clone();
    for n in 2..=cfg.max_terms {
        power = &power * &e;
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        acc.axpy(sign / n as f64, &power);
        if frobenius_norm(&power) / (n as f64) < cfg.abs_tol {
            break;
        }
    }
    Ok(acc)
}

/// Norm bound `-log(1 - ‖M - I‖₂)` on `‖log M‖₂`.
pub fn log_norm_bound(m: &Matrix) -> Result<f64> {
    let radius = spectral_norm(&(m - &Matrix::identity(m.dim())))?;
    Ok(-(1.0 - radius).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::mat_exp;

    #[test]
    fn identity_and_diagonal() {
        let cfg = SeriesConfig::default();
        assert!(mat_log(&Matrix::identity(3), &cfg).unwrap().is_zero());
        let long = SeriesConfig::new(200, 1e-16).unwrap();
        let l = mat_log(&Matrix::from_diag(&[1.5, 0.8]), &long).unwrap();
        assert!((l[(0, 0)] - 1.5f64.ln()).abs() < 1e-13);
        assert!((l[(1, 1)] - 0.8f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn round_trip_small() {
        let y = Matrix::from_rows(&[[0.02, -0.05], [0.07, 0.03]]).unwrap();
        let y = y.scaled(0.1 / frobenius_norm(&y));
        let back = mat_log(&mat_exp(&y).unwrap(), &SeriesConfig::default()).unwrap();
        assert!(frobenius_norm(&(&back - &y)) < 1e-10);
    }

    #[test]
    fn outside_domain() {
        let cfg = SeriesConfig::default();
        assert!(matches!(
            mat_log(&Matrix::from_diag(&[2.5, 1.0]), &cfg),
            Err(Error::Domain(_))
        ));
    }
}

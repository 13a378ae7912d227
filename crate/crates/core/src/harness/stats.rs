use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkit::{frobenius_norm, Matrix};

/// `‖X_ref - X_app‖_F / ‖X_ref‖_F`.
pub fn relative_error(reference: &Matrix, approx: &Matrix) -> f64 {
    frobenius_norm(&(reference - approx)) / frobenius_norm(reference)
}

/// Time-averaged relative error `(1/N) Σ_{k=1}^{N} ‖X^ref_k - X^app_k‖_F / ‖X^ref_k‖_F`.
///
/// Both trajectories hold the grid points `t_0, …, t_N`; the initial point is skipped.
pub fn err_t(ref_path: &[Matrix], app_path: &[Matrix]) -> Result<f64> {
    if ref_path.len() != app_path.len() {
        return Err(Error::LengthMismatch {
            expected: ref_path.len(),
            got: app_path.len(),
        });
    }
    if ref_path.len() < 2 {
        return Err(Error::Config("Err_t needs at least one step".into()));
    }
    let n = ref_path.len() - 1;
    let sum: f64 = ref_path[1..]
        .iter()
        .zip(&app_path[1..])
        .map(|(r, a)| relative_error(r, a))
        .sum();
    Ok(sum / n as f64)
}

/// Running version of [`err_t`]: entry `k` is the average over steps `1..=k`, entry 0 is 0.
pub fn running_err(relative: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(relative.len());
    let mut acc = 0.0;
    for (k, &r) in relative.iter().enumerate() {
        if k == 0 {
            out.push(0.0);
            continue;
        }
        acc += r;
        out.push(acc / k as f64);
    }
    out
}

/// Sorted values paired with `k / M`.
pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::Config("empirical CDF of an empty sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(k, v)| (v, (k + 1) as f64 / m))
        .collect())
}

/// Monte Carlo sample of the error of one method at one report time.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    pub method: String,
    pub t: f64,
    pub samples: Vec<f64>,
    pub mean: f64,
}

impl ErrorStats {
    pub fn new(method: impl Into<String>, t: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Config("no samples".into()));
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        Ok(Self {
            method: method.into(),
            t,
            samples,
            mean,
        })
    }

    pub fn mean_percent(&self) -> f64 {
        100.0 * self.mean
    }

    pub fn cdf(&self) -> Vec<(f64, f64)> {
        empirical_cdf(&self.samples).expect("nonempty by construction")
    }
}

/// Accumulated wall-clock time of one method across samples.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MethodTimer {
    pub logarithm: Duration,
    pub exponential: Duration,
    pub total: Duration,
}

impl std::ops::AddAssign for MethodTimer {
    fn add_assign(&mut self, rhs: Self) {
        self.logarithm += rhs.logarithm;
        self.exponential += rhs.exponential;
        self.total += rhs.total;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingReport {
    pub method: String,
    pub log_s: f64,
    pub expm_s: f64,
    pub total_s: f64,
}

/// Splits a timer into logarithm, exponential and total seconds. Iterative
/// schemes have no split and report only the total.
pub fn timing_split(method: impl Into<String>, timer: &MethodTimer) -> TimingReport {
    TimingReport {
        method: method.into(),
        log_s: timer.logarithm.as_secs_f64(),
        expm_s: timer.exponential.as_secs_f64(),
        total_s: timer.total.as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn err_t_examples() {
        let refs = vec![Matrix::identity(2); 4];
        assert_eq!(err_t(&refs, &refs).unwrap(), 0.0);
        let doubled: Vec<Matrix> = refs.iter().map(|m| m.scaled(2.0)).collect();
        assert!((err_t(&refs, &doubled).unwrap() - 1.0).abs() < 1e-15);
        // N = 2 with relative errors 0.1 and 0.3
        let r = vec![Matrix::identity(2); 3];
        let a = vec![
            Matrix::identity(2),
            Matrix::identity(2).scaled(1.1),
            Matrix::identity(2).scaled(0.7),
        ];
        assert!((err_t(&r, &a).unwrap() - 0.2).abs() < 1e-15);
        assert!(err_t(&r, &a[..2]).is_err());
    }

    #[test]
    fn running_average() {
        let got = running_err(&[0.0, 0.1, 0.3, 0.2]);
        for (g, e) in got.iter().zip([0.0, 0.1, 0.2, 0.2]) {
            assert!((g - e).abs() < 1e-15);
        }
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(empirical_cdf(&[0.5]).unwrap(), vec![(0.5, 1.0)]);
        assert_eq!(
            empirical_cdf(&[3.0, 1.0, 2.0]).unwrap(),
            vec![(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (3.0, 1.0)]
        );
        let ties = empirical_cdf(&[1.0, 1.0]).unwrap();
        assert_eq!(ties, vec![(1.0, 0.5), (1.0, 1.0)]);
        assert!(empirical_cdf(&[]).is_err());
    }

    #[test]
    fn timing_report() {
        let t = MethodTimer {
            logarithm: Duration::from_millis(10),
            exponential: Duration::from_millis(30),
            total: Duration::from_millis(45),
        };
        let r = timing_split("m3", &t);
        assert_eq!(r.method, "m3");
        assert!((r.total_s - 0.045).abs() < 1e-12);
        let euler = timing_split("euler", &MethodTimer { total: Duration::from_secs(1), ..Default::default() });
        assert_eq!((euler.log_s, euler.expm_s), (0.0, 0.0));
    }
}

use super::Matrix;
use crate::error::{Error, Result};

const POWER_ITERATION_CAP: usize = 10_000;
const POWER_ITERATION_RTOL: f64 = 1e-10;

/// Entry-wise Euclidean norm.
pub fn frobenius_norm(m: &Matrix) -> f64 {
    m.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Largest singular value, by power iteration on `MᵀM`.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    m.ensure_finite()?;
    let n = m.dim();
    if m.is_zero() {
        return Ok(0.0);
    }
    let gram = &m.transpose() * m;

    // an irregular start vector; fall back to basis vectors if it lands in the kernel
    let golden = 0.618_033_988_749_895_f64;
    let mut starts: Vec<Vec<f64>> = vec![(0..n).map(|i| 1.0 + (i as f64 * golden).fract()).collect()];
    starts.extend((0..n).map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()));

    for start in starts {
        let mut v = start;
        normalize(&mut v);
        let mut lambda_prev = f64::NAN;
        for _ in 0..POWER_ITERATION_CAP {
            let w = gram.mul_vec(&v)?;
            let lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if wn == 0.0 {
                break;
            }
            v = w.into_iter().map(|x| x / wn).collect();
            if (lambda - lambda_prev).abs() <= POWER_ITERATION_RTOL * lambda.abs() {
                // one more Rayleigh quotient on the updated vector
                let w = gram.mul_vec(&v)?;
                let refined: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                return Ok(refined.max(lambda).max(0.0).sqrt());
            }
            lambda_prev = lambda;
        }
        if lambda_prev.is_finite() && lambda_prev > 0.0 {
            return Err(Error::Numeric(format!(
                "power iteration did not converge in {POWER_ITERATION_CAP} steps"
            )));
        }
    }
    Err(Error::Numeric("power iteration found no dominant direction".into()))
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

//! Commutators and the series operators built on `ad_Σ`.

use std::f64::consts::PI;

use super::{spectral_norm, Matrix, SeriesConfig};
use crate::error::{Error, Result};

/// Exact Bernoulli numbers `β_k` (convention `β_1 = -1/2`) as (numerator, denominator).
const BERNOULLI_TABLE: [(i64, i64); 31] = [
    (1, 1),
    (-1, 2),
    (1, 6),
    (0, 1),
    (-1, 30),
    (0, 1),
    (1, 42),
    (0, 1),
    (-1, 30),
    (0, 1),
    (5, 66),
    (0, 1),
    (-691, 2730),
    (0, 1),
    (7, 6),
    (0, 1),
    (-3617, 510),
    (0, 1),
    (43867, 798),
    (0, 1),
    (-174611, 330),
    (0, 1),
    (854513, 138),
    (0, 1),
    (-236364091, 2730),
    (0, 1),
    (8553103, 6),
    (0, 1),
    (-23749461029, 870),
    (0, 1),
    (8615841276005, 14322),
];

/// Largest index accepted by [`bernoulli`].
pub const BERNOULLI_TABLE_MAX: usize = BERNOULLI_TABLE.len() - 1;

/// `[M, N] = MN - NM`
pub fn commutator(m: &Matrix, n: &Matrix) -> Result<Matrix> {
    m.ensure_same_dim(n)?;
    Ok(commutator_unchecked(m, n))
}

pub(crate) fn commutator_unchecked(m: &Matrix, n: &Matrix) -> Matrix {
    let mut out = m * n;
    let nm = n * m;
    out -= &nm;
    out
}

/// `ad_Σ^j(M)`: `j` nested commutators with `Σ` on the left.
pub fn ad_power(sigma: &Matrix, m: &Matrix, j: usize) -> Result<Matrix> {
    sigma.ensure_same_dim(m)?;
    let mut out = m.clone();
    for _ in 0..j {
        if out.is_zero() {
            break;
        }
        out = commutator_unchecked(sigma, &out);
    }
    Ok(out)
}

/// Bernoulli number `β_k`, the `k`-th derivative of `x / (e^x - 1)` at zero.
pub fn bernoulli(k: usize) -> Result<f64> {
    BERNOULLI_TABLE
        .get(k)
        .map(|&(num, den)| num as f64 / den as f64)
        .ok_or(Error::BernoulliOutOfTable(k))
}

/// `β_k / k!` for any `k`.
///
/// Uses the exact table where available and `β_2m / (2m)! = (-1)^(m+1) 2 ζ(2m) / (2π)^(2m)` beyond it.
pub fn bernoulli_weight(k: usize) -> f64 {
    if k <= BERNOULLI_TABLE_MAX {
        let (num, den) = BERNOULLI_TABLE[k];
        return num as f64 / den as f64 / factorial(k);
    }
    if k % 2 == 1 {
        return 0.0;
    }
    let m = k / 2;
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 * zeta_even(k) / (2.0 * PI).powi(k as i32)
}

// k >= 32 here, so a handful of terms is already at machine precision.
fn zeta_even(k: usize) -> f64 {
    (1..=12).map(|n| (n as f64).powi(-(k as i32))).sum()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `dexp_Σ(M) = Σ_n ad_Σ^n(M) / (n+1)!`, the left trivialised differential of `exp` at `Σ`.
pub fn dexp(sigma: &Matrix, m: &Matrix, cfg: &SeriesConfig) -> Result<Matrix> {
    sigma.ensure_same_dim(m)?;
    let mut acc = m.clone();
    let mut ad = m.clone();
    let mut fact = 1.0;
    for n in 1..cfg.max_terms {
        ad = commutator_unchecked(sigma, &ad);
        if ad.is_zero() {
            break;
        }
        fact *= (n + 1) as f64;
        acc.axpy(1.0 / fact, &ad);
        if super::frobenius_norm(&ad) / fact < cfg.abs_tol {
            break;
        }
    }
    Ok(acc)
}

/// Inverse of [`dexp`] by the Bernoulli series `Σ_k β_k / k! ad_Σ^k(M)`.
///
/// The series is only used inside its disc of convergence: `‖Σ‖₂ < π`.
pub fn dexp_inv(sigma: &Matrix, m: &Matrix, cfg: &SeriesConfig) -> Result<Matrix> {
    sigma.ensure_same_dim(m)?;
    let norm = spectral_norm(sigma)?;
    if norm >= PI {
        return Err(Error::Domain(format!(
            "dexp_inv requires spectral norm < π, got {norm}"
        )));
    }
    Ok(dexp_inv_series(sigma, m, cfg))
}

fn dexp_inv_series(sigma: &Matrix, m: &Matrix, cfg: &SeriesConfig) -> Matrix {
    let mut acc = m.clone();
    let mut ad = m.clone();
    for k in 1..cfg.max_terms {
        ad = commutator_unchecked(sigma, &ad);
        if ad.is_zero() {
            break;
        }
        let w = bernoulli_weight(k);
        if w == 0.0 {
            continue;
        }
        acc.axpy(w, &ad);
        if k >= 2 && w.abs() * super::frobenius_norm(&ad) < cfg.abs_tol {
            break;
        }
    }
    acc
}

/// Symmetric second differential of `exp` at `Σ`, right-trivialised:
/// `d²/ds dt exp(Σ + sM + tN) = ddexp_Σ(M, N) e^Σ`.
///
/// The double series is truncated to `n + m ≤ cfg.max_terms`.
pub fn ddexp(sigma: &Matrix, m: &Matrix, n: &Matrix, cfg: &SeriesConfig) -> Result<Matrix> {
    sigma.ensure_same_dim(m)?;
    sigma.ensure_same_dim(n)?;
    let k = cfg.max_terms;
    let powers = |x: &Matrix| {
        let mut out = Vec::with_capacity(k + 1);
        out.push(x.clone());
        for _ in 0..k {
            let next = commutator_unchecked(sigma, out.last().unwrap());
            out.push(next);
        }
        out
    };
    let ad_m = powers(m);
    let ad_n = powers(n);

    let mut acc = Matrix::zeros(m.dim());
    for i in 0..=k {
        for j in 0..=(k - i) {
            if ad_m[i].is_zero() && ad_n[j].is_zero() {
                continue;
            }
            // ad^i(M) ad^j(N) / ((i+1)! (j+1)!)
            let w1 = 1.0 / (factorial(i + 1) * factorial(j + 1));
            acc.axpy(w1, &(&ad_m[i] * &ad_n[j]));
            // [ad^i(N), ad^j(M)] / ((i+j+2) (i+1)! j!)
            let w2 = 1.0 / ((i + j + 2) as f64 * factorial(i + 1) * factorial(j));
            acc.axpy(w2, &commutator_unchecked(&ad_n[i], &ad_m[j]));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{frobenius_norm, mat_exp};

    fn bench_a() -> Matrix {
        Matrix::from_rows(&[[0.335302, -0.645492], [-0.264419, 0.634641]]).unwrap()
    }

    fn bench_b() -> Matrix {
        Matrix::from_rows(&[[-0.0572262, 0.0493763], [-0.665366, 0.742744]]).unwrap()
    }

    fn pseudo_random(dim: usize, seed: u64, scale: f64) -> Matrix {
        // splitmix64 keeps these fixtures independent of the rand crate
        let mut state = seed;
        Matrix::from_fn(dim, |_, _| {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^= z >> 31;
            scale * ((z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0)
        })
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = bench_a();
        assert!(commutator(&a, &a).unwrap().is_zero());
        assert!(commutator(&Matrix::identity(2), &a).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn commutator_of_benchmark_constants() {
        let (a, b) = (bench_a(), bench_b());
        let c = commutator(&a, &b).unwrap();
        // AB - BA entry by entry
        let ab00 = 0.335302 * -0.0572262 + -0.645492 * -0.665366;
        let ba00 = -0.0572262 * 0.335302 + 0.0493763 * -0.264419;
        let ab01 = 0.335302 * 0.0493763 + -0.645492 * 0.742744;
        let ba01 = -0.0572262 * -0.645492 + 0.0493763 * 0.634641;
        assert!((c[(0, 0)] - (ab00 - ba00)).abs() < 1e-15);
        assert!((c[(0, 1)] - (ab01 - ba01)).abs() < 1e-15);
        assert!(c.max_abs() > 0.1);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        assert!(matches!(
            commutator(&Matrix::zeros(2), &Matrix::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ad_power_basics() {
        let s = pseudo_random(3, 1, 1.0);
        let m = pseudo_random(3, 2, 1.0);
        assert_eq!(ad_power(&s, &m, 0).unwrap(), m);
        assert!(ad_power(&Matrix::zeros(3), &m, 3).unwrap().is_zero());
        let twice = commutator(&s, &commutator(&s, &m).unwrap()).unwrap();
        assert!(frobenius_norm(&(&ad_power(&s, &m, 2).unwrap() - &twice)) < 1e-15);
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0).unwrap(), 1.0);
        assert_eq!(bernoulli(1).unwrap(), -0.5);
        assert!((bernoulli(2).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(bernoulli(3).unwrap(), 0.0);
        assert!(bernoulli(16).is_ok());
        assert!(matches!(bernoulli(31), Err(Error::BernoulliOutOfTable(31))));
    }

    #[test]
    fn bernoulli_weight_zeta_route_matches_table() {
        for m in 1..=15 {
            let k = 2 * m;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            let zeta: f64 = if k == 2 {
                PI * PI / 6.0
            } else {
                (1..100_000).map(|n| (n as f64).powi(-(k as i32))).sum()
            };
            let via_zeta = sign * 2.0 * zeta / (2.0 * PI).powi(k as i32);
            let rel = (via_zeta - bernoulli_weight(k)).abs() / bernoulli_weight(k).abs();
            assert!(rel < 1e-9, "k={k} rel={rel}");
        }
        assert_eq!(bernoulli_weight(33), 0.0);
        assert!(bernoulli_weight(32) < 0.0);
    }

    #[test]
    fn dexp_zero_and_nilpotent() {
        let cfg = SeriesConfig::default();
        let m = pseudo_random(3, 5, 1.0);
        let at_zero = dexp(&Matrix::zeros(3), &m, &cfg).unwrap();
        assert_eq!(at_zero, m);

        let mut s = Matrix::zeros(2);
        s[(0, 1)] = 1.0;
        let m2 = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let mut expected = m2.clone();
        expected.axpy(0.5, &commutator(&s, &m2).unwrap());
        // Σ² = 0 does not make ad_Σ nilpotent of order 2, so compare with the
        // full series computed by explicit ad powers instead.
        let mut series = Matrix::zeros(2);
        let mut f = 1.0;
        for n in 0..30 {
            f *= (n + 1) as f64;
            series.axpy(1.0 / f, &ad_power(&s, &m2, n).unwrap());
        }
        let got = dexp(&s, &m2, &cfg).unwrap();
        assert!(frobenius_norm(&(&got - &series)) < 1e-14);
        // ad_Σ^3 vanishes for this Σ, so the closed form has three terms
        let mut closed = expected;
        closed.axpy(1.0 / 6.0, &ad_power(&s, &m2, 2).unwrap());
        assert!(frobenius_norm(&(&got - &closed)) < 1e-14);

        // with ΣMΣ = 0 as well, only M + [Σ,M]/2 survives
        let upper = Matrix::from_rows(&[[1.0, 2.0], [0.0, 4.0]]).unwrap();
        let mut two_terms = upper.clone();
        two_terms.axpy(0.5, &commutator(&s, &upper).unwrap());
        assert_eq!(dexp(&s, &upper, &cfg).unwrap(), two_terms);
    }

    #[test]
    fn dexp_matches_finite_difference() {
        let cfg = SeriesConfig::default();
        let s = pseudo_random(3, 11, 0.5);
        let m = pseudo_random(3, 12, 1.0);
        let es = mat_exp(&s).unwrap();
        let lhs = &dexp(&s, &m, &cfg).unwrap() * &es;
        let mut prev = f64::INFINITY;
        for h in [1e-4, 1e-5, 1e-6] {
            let mut shifted = s.clone();
            shifted.axpy(h, &m);
            let fd = (&mat_exp(&shifted).unwrap() - &es).scaled(1.0 / h);
            let rel = frobenius_norm(&(&lhs - &fd)) / frobenius_norm(&lhs);
            assert!(rel < prev, "error should shrink with h");
            prev = rel;
        }
        assert!(prev <= 1e-4);
    }

    #[test]
    fn dexp_inv_gate_and_zero() {
        let cfg = SeriesConfig::default();
        let m = pseudo_random(3, 21, 1.0);
        assert_eq!(dexp_inv(&Matrix::zeros(3), &m, &cfg).unwrap(), m);
        let big = Matrix::from_diag(&[3.2, 0.0]);
        assert!(matches!(
            dexp_inv(&big, &Matrix::identity(2), &cfg),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ddexp_at_zero_is_symmetrised_product() {
        let cfg = SeriesConfig::default();
        let m = pseudo_random(3, 31, 1.0);
        let n = pseudo_random(3, 32, 1.0);
        let got = ddexp(&Matrix::zeros(3), &m, &n, &cfg).unwrap();
        let expected = (&(&m * &n) + &(&n * &m)).scaled(0.5);
        assert!(frobenius_norm(&(&got - &expected)) < 1e-14);
    }

    #[test]
    fn ddexp_matches_second_difference() {
        let cfg = SeriesConfig::default();
        let s = pseudo_random(3, 41, 0.7);
        let m = pseudo_random(3, 42, 1.0);
        let h = 1e-4;
        let at = |t: f64| {
            let mut x = s.clone();
            x.axpy(t, &m);
            mat_exp(&x).unwrap()
        };
        let fd = (&(&at(h) - &at(0.0).scaled(2.0)) + &at(-h)).scaled(1.0 / (h * h));
        let lhs = &ddexp(&s, &m, &m, &cfg).unwrap() * &at(0.0);
        let rel = frobenius_norm(&(&lhs - &fd)) / frobenius_norm(&lhs);
        assert!(rel <= 1e-3, "rel={rel}");
    }

    #[test]
    fn scalar_case_reduces_to_calculus() {
        let cfg = SeriesConfig::default();
        let s = Matrix::from_diag(&[0.7]);
        let m = Matrix::from_diag(&[2.0]);
        assert!(commutator(&s, &m).unwrap().is_zero());
        assert_eq!(dexp(&s, &m, &cfg).unwrap(), m);
        assert_eq!(dexp_inv(&s, &m, &cfg).unwrap(), m);
        let dd = ddexp(&s, &m, &m, &cfg).unwrap();
        assert!((dd[(0, 0)] - 4.0).abs() < 1e-14);
    }
}

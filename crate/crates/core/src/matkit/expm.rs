//! Matrix exponential by scaling and squaring with the degree-13 diagonal Padé approximant.

use super::Matrix;
use crate::error::Result;

/// Padé [13/13] numerator coefficients for `exp`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled [13/13] approximant is accurate to double precision.
pub const THETA_13: f64 = 5.371_920_351_148_152;

/// `e^M`.
pub fn mat_exp(m: &Matrix) -> Result<Matrix> {
    m.ensure_finite()?;
    let n = m.dim();
    if n == 1 {
        return Ok(Matrix::from_diag(&[m[(0, 0)].exp()]));
    }
    if m.is_zero() {
        return Ok(Matrix::identity(n));
    }

    let norm = m.norm_one();
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a = m.scaled(0.5f64.powi(squarings as i32));

    let b = &PADE13;
    let ident = Matrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let mut u_inner = a6.scaled(b[13]);
    u_inner.axpy(b[11], &a4);
    u_inner.axpy(b[9], &a2);
    let mut u_poly = &a6 * &u_inner;
    u_poly.axpy(b[7], &a6);
    u_poly.axpy(b[5], &a4);
    u_poly.axpy(b[3], &a2);
    u_poly.axpy(b[1], &ident);
    let u = &a * &u_poly;

    let mut v_inner = a6.scaled(b[12]);
    v_inner.axpy(b[10], &a4);
    v_inner.axpy(b[8], &a2);
    let mut v = &a6 * &v_inner;
    v.axpy(b[6], &a6);
    v.axpy(b[4], &a4);
    v.axpy(b[2], &a2);
    v.axpy(b[0], &ident);

    let q = &v - &u;
    let p = &v + &u;
    let mut r = q.solve(&p)?;
    let mut tmp = Matrix::zeros(n);
    for _ in 0..squarings {
        r.matmul_into(&r, &mut tmp);
        std::mem::swap(&mut r, &mut tmp);
    }
    r.ensure_finite()?;
    Ok(r)
}

use super::{LinearSde, MagnusTerms};
use crate::error::{Error, Result};
use crate::matkit::{commutator_unchecked, Matrix};
use crate::randpath::BrownianPath;

/// First- and second-order terms for arbitrary coefficients and any number of drivers.
///
/// The second-order term splits by its number of drift factors:
///
/// ```text
/// Y^(2,0) = -1/2 Σ_j ∫ (A^j)² ds + 1/2 Σ_j ∫ [A^j, Y^(1,0)] dW^j
/// Y^(1,1) =  1/2 ∫ [B, Y^(1,0)] ds + 1/2 Σ_j ∫ [A^j, Y^(0,1)] dW^j
/// Y^(0,2) =  1/2 ∫ [B, Y^(0,1)] ds
/// ```
///
/// with `Y^(1,0) = Σ_j ∫ A^j dW^j` and `Y^(0,1) = ∫ B ds`. All integrals are
/// left-point sums on the path's grid, coefficients evaluated at the left end.
pub fn terms_general(sde: &LinearSde, path: &BrownianPath, order: usize) -> Result<MagnusTerms> {
    if !(1..=2).contains(&order) {
        return Err(Error::Unsupported(format!(
            "explicit iterated integrals are implemented up to order 2, got {order}"
        )));
    }
    if path.channels() != sde.q() {
        return Err(Error::Config(format!(
            "SDE has {} drivers but the path has {} channels",
            sde.q(),
            path.channels()
        )));
    }
    let grid = *path.grid();
    let n = grid.n_steps();
    let dt = grid.dt();
    let d = sde.dim();
    let q = sde.q();

    // squares of constant diffusion coefficients are reused at every step
    let const_squares: Vec<Option<Matrix>> = (0..q)
        .map(|j| match sde.diffusion(j) {
            super::Coefficient::Constant(a) => Some(a * a),
            _ => None,
        })
        .collect();

    let mut y10 = Matrix::zeros(d);
    let mut y01 = Matrix::zeros(d);
    let mut y20 = Matrix::zeros(d);
    let mut y11 = Matrix::zeros(d);
    let mut y02 = Matrix::zeros(d);

    let mut first = Vec::with_capacity(n + 1);
    let mut second = Vec::with_capacity(if order >= 2 { n + 1 } else { 0 });
    first.push(Matrix::zeros(d));
    if order >= 2 {
        second.push(Matrix::zeros(d));
    }

    for k in 0..n {
        let t = grid.time(k);
        let b = sde.drift_at(t)?;
        let mut dy10 = Matrix::zeros(d);
        for j in 0..q {
            let a = sde.diffusion_at(j, t)?;
            let dw = path.increment(j, k);
            dy10.axpy(dw, &a);
            if order >= 2 {
                match &const_squares[j] {
                    Some(a2) => y20.axpy(-0.5 * dt, a2),
                    None => y20.axpy(-0.5 * dt, &(&*a * &*a)),
                }
                y20.axpy(0.5 * dw, &commutator_unchecked(&a, &y10));
                y11.axpy(0.5 * dw, &commutator_unchecked(&a, &y01));
            }
        }
        if order >= 2 {
            y11.axpy(0.5 * dt, &commutator_unchecked(&b, &y10));
            y02.axpy(0.5 * dt, &commutator_unchecked(&b, &y01));
        }
        y10 += &dy10;
        y01.axpy(dt, &b);

        first.push(&y10 + &y01);
        if order >= 2 {
            let mut s = &y20 + &y11;
            s += &y02;
            second.push(s);
        }
    }

    let mut terms = vec![first];
    if order >= 2 {
        terms.push(second);
    }
    Ok(MagnusTerms::new(grid, (0..=n).collect(), terms))
}

//! Closed-form Magnus terms in which every stochastic integral has been
//! integrated by parts into Lebesgue integrals of the path.

use super::MagnusTerms;
use crate::error::{Error, Result};
use crate::matkit::{commutator, Matrix};
use crate::randpath::{BrownianPath, PathIntegrals};

fn check_single_driver(path: &BrownianPath, ints: &PathIntegrals) -> Result<()> {
    if path.channels() != 1 {
        return Err(Error::Unsupported(format!(
            "closed forms need a single Brownian driver, path has {}",
            path.channels()
        )));
    }
    if ints.channels() != 1 || ints.channel(0).w.len() != path.grid().n_steps() + 1 {
        return Err(Error::LengthMismatch {
            expected: path.grid().n_steps() + 1,
            got: ints.channel(0).w.len(),
        });
    }
    Ok(())
}

/// `Y1, Y2, Y3` for constant `A`, `B` at every grid point.
pub fn terms_const(
    a: &Matrix,
    b: &Matrix,
    path: &BrownianPath,
    ints: &PathIntegrals,
) -> Result<MagnusTerms> {
    let all: Vec<usize> = (0..=path.grid().n_steps()).collect();
    terms_const_at(a, b, path, ints, &all)
}

/// Like [`terms_const`] but only at the given grid indices, which must be increasing.
///
/// Each term costs a handful of scalar multiples of four fixed matrices, so
/// sampling the terms sparsely avoids work when only a few times are needed.
pub fn terms_const_at(
    a: &Matrix,
    b: &Matrix,
    path: &BrownianPath,
    ints: &PathIntegrals,
    indices: &[usize],
) -> Result<MagnusTerms> {
    a.ensure_same_dim(b)?;
    a.ensure_finite()?;
    b.ensure_finite()?;
    check_single_driver(path, ints)?;
    let grid = *path.grid();
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("indices must be strictly increasing".into()));
    }
    if let Some(&k) = indices.iter().find(|&&k| k > grid.n_steps()) {
        return Err(Error::Config(format!("index {k} is off the grid")));
    }

    let ab = commutator(a, b)?;
    let ba = ab.scaled(-1.0);
    let baa = commutator(&ba, a)?;
    let bab = commutator(&ba, b)?;
    let a2 = a * a;
    let w = path.channel(0);
    let ch = ints.channel(0);

    let mut y1 = Vec::with_capacity(indices.len());
    let mut y2 = Vec::with_capacity(indices.len());
    let mut y3 = Vec::with_capacity(indices.len());
    for &k in indices {
        let t = grid.time(k);
        let wt = w[k];
        let (iw, isw, iw2) = (ch.w[k], ch.sw[k], ch.w2[k]);

        let mut m1 = b.scaled(t);
        m1.axpy(wt, a);
        y1.push(m1);

        let mut m2 = ab.scaled(0.5 * t * wt - iw);
        m2.axpy(-0.5 * t, &a2);
        y2.push(m2);

        let mut m3 = baa.scaled(0.5 * iw2 - 0.5 * wt * iw + t * wt * wt / 12.0);
        m3.axpy(isw - 0.5 * t * iw - t * t * wt / 12.0, &bab);
        y3.push(m3);
    }
    Ok(MagnusTerms::new(grid, indices.to_vec(), vec![y1, y2, y3]))
}

/// `Y1, Y2, Y3` for `A_t = [[2, t], [0, -1]]` and `B = 0` at every grid point.
pub fn terms_triangular(path: &BrownianPath, ints: &PathIntegrals) -> Result<MagnusTerms> {
    check_single_driver(path, ints)?;
    let grid = *path.grid();
    let n = grid.n_steps();
    let w = path.channel(0);
    let ch = ints.channel(0);

    let mut y1 = Vec::with_capacity(n + 1);
    let mut y2 = Vec::with_capacity(n + 1);
    let mut y3 = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = grid.time(k);
        let wt = w[k];
        let (iw, isw, iw2, iw3) = (ch.w[k], ch.sw[k], ch.w2[k], ch.w3[k]);

        y1.push(Matrix::from_row_major(2, vec![2.0 * wt, t * wt - iw, 0.0, -wt])?);
        y2.push(Matrix::from_row_major(
            2,
            vec![
                -2.0 * t,
                -0.25 * t * t - 1.5 * (wt * iw - iw2),
                0.0,
                -0.5 * t,
            ],
        )?);
        let corner = 0.75 * (t - wt * wt) * iw - 1.5 * isw + 2.25 * wt * iw2 - 1.5 * iw3
            + 0.375 * t * t * wt;
        y3.push(Matrix::from_row_major(2, vec![0.0, corner, 0.0, 0.0])?);
    }
    Ok(MagnusTerms::new(grid, (0..=n).collect(), vec![y1, y2, y3]))
}

//! Bernoulli-weighted recursion for the Magnus terms.
//!
//! The logarithm obeys `dY = μ(Y) dt + σ(Y) dW` with
//!
//! ```text
//! σ = dexp_Y^{-1}(A)
//! μ = dexp_Y^{-1}(B - 1/2 ddexp_Y(σ, σ))
//! ```
//!
//! Tagging `A` with a bookkeeping parameter `ε` and `B` with `δ`, the term
//! `Y_n` is the part of `Y` of total degree `n` in `(ε, δ)`. We therefore carry
//! `Y` as a truncated bivariate series and run the equation above through the
//! grid with left-point increments, dropping every product of degree above `n`.
//! Only finitely many operator powers survive the truncation, so the infinite
//! series for `dexp^{-1}` and `ddexp` reduce to exact finite sums.

use super::{LinearSde, MagnusTerms};
use crate::error::{Error, Result};
use crate::matkit::{bernoulli_weight, commutator_unchecked, factorial, Matrix};
use crate::randpath::BrownianPath;

/// Highest order supported by the recursion.
pub const MAX_RECURSION_ORDER: usize = 3;

/// Matrix-valued polynomial in `(ε, δ)` without constant term, truncated at total degree `order`.
#[derive(Clone, Debug)]
struct Graded {
    order: usize,
    dim: usize,
    // slot(r, s) holds the coefficient of ε^r δ^s; None stands for zero
    parts: Vec<Option<Matrix>>,
}

fn slot(r: usize, s: usize) -> usize {
    let g = r + s;
    g * (g + 1) / 2 - 1 + r
}

impl Graded {
    fn zero(order: usize, dim: usize) -> Self {
        Self {
            order,
            dim,
            parts: vec![None; order * (order + 3) / 2],
        }
    }

    fn monomial(order: usize, r: usize, s: usize, m: Matrix) -> Self {
        let mut out = Self::zero(order, m.dim());
        out.parts[slot(r, s)] = Some(m);
        out
    }

    fn grades(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order;
        (1..=n).flat_map(|g| (0..=g).map(move |r| (r, g - r)))
    }

    fn get(&self, r: usize, s: usize) -> Option<&Matrix> {
        self.parts[slot(r, s)].as_ref()
    }

    fn add_to(&mut self, r: usize, s: usize, scale: f64, m: &Matrix) {
        match &mut self.parts[slot(r, s)] {
            Some(acc) => acc.axpy(scale, m),
            empty => *empty = Some(m.scaled(scale)),
        }
    }

    fn axpy(&mut self, scale: f64, other: &Graded) {
        if scale == 0.0 {
            return;
        }
        for (r, s) in other.grades() {
            if let Some(m) = other.get(r, s) {
                self.add_to(r, s, scale, m);
            }
        }
    }

    /// Truncated bilinear product `Σ op(x_(a,b), y_(c,d)) ε^{a+c} δ^{b+d}`.
    fn bilinear(&self, other: &Graded, op: impl Fn(&Matrix, &Matrix) -> Matrix) -> Graded {
        let mut out = Graded::zero(self.order, self.dim);
        for (a, b) in self.grades() {
            let Some(x) = self.get(a, b) else { continue };
            for (c, d) in other.grades() {
                if a + b + c + d > self.order {
                    continue;
                }
                if let Some(y) = other.get(c, d) {
                    out.add_to(a + c, b + d, 1.0, &op(x, y));
                }
            }
        }
        out
    }

    fn ad(&self, other: &Graded) -> Graded {
        self.bilinear(other, commutator_unchecked)
    }

    fn mul(&self, other: &Graded) -> Graded {
        self.bilinear(other, |x, y| x * y)
    }

    fn total(&self, g: usize) -> Matrix {
        let mut acc = Matrix::zeros(self.dim);
        for r in 0..=g {
            if let Some(m) = self.get(r, g - r) {
                acc += m;
            }
        }
        acc
    }
}

/// `[ad_Y^0(m), ad_Y^1(m), …]` up to the power that can still contribute.
fn ad_powers(y: &Graded, m: &Graded) -> Vec<Graded> {
    let mut out = vec![m.clone()];
    for _ in 1..y.order {
        let next = y.ad(out.last().unwrap());
        out.push(next);
    }
    out
}

fn dexp_inv(powers: &[Graded]) -> Graded {
    let mut acc = powers[0].clone();
    for (i, p) in powers.iter().enumerate().skip(1) {
        acc.axpy(bernoulli_weight(i), p);
    }
    acc
}

/// Truncated `ddexp_Y(σ, σ)` from the powers `ad_Y^i(σ)`.
fn ddexp_diag(powers: &[Graded]) -> Graded {
    let order = powers[0].order;
    let mut acc = Graded::zero(order, powers[0].dim);
    // a factor ad^i(σ) has degree at least i + 1, so products need a + b + 2 <= order
    for a in 0..powers.len() {
        for b in 0..powers.len() {
            if a + b + 2 > order {
                continue;
            }
            let sym = powers[a].mul(&powers[b]);
            acc.axpy(1.0 / (factorial(a + 1) * factorial(b + 1)), &sym);
            let bracket = powers[b].ad(&powers[a]);
            acc.axpy(
                1.0 / ((a + b + 2) as f64 * factorial(b + 1) * factorial(a)),
                &bracket,
            );
        }
    }
    acc
}

/// `Y1..Yn` at every grid point from the recursion, for `n <= 3` and one driver.
pub fn recursion_terms(sde: &LinearSde, path: &BrownianPath, order: usize) -> Result<MagnusTerms> {
    if !(1..=MAX_RECURSION_ORDER).contains(&order) {
        return Err(Error::Unsupported(format!(
            "the recursion is implemented up to order {MAX_RECURSION_ORDER}, got {order}"
        )));
    }
    if sde.q() != 1 || path.channels() != 1 {
        return Err(Error::Unsupported(
            "the recursion is implemented for a single Brownian driver".into(),
        ));
    }
    let grid = *path.grid();
    let n = grid.n_steps();
    let dt = grid.dt();
    let d = sde.dim();

    let mut y = Graded::zero(order, d);
    let mut terms: Vec<Vec<Matrix>> = (0..order)
        .map(|_| {
            let mut v = Vec::with_capacity(n + 1);
            v.push(Matrix::zeros(d));
            v
        })
        .collect();

    for k in 0..n {
        let t = grid.time(k);
        let a = Graded::monomial(order, 1, 0, sde.diffusion_at(0, t)?.into_owned());
        let b = Graded::monomial(order, 0, 1, sde.drift_at(t)?.into_owned());

        let sigma_powers = ad_powers(&y, &a);
        let sigma = dexp_inv(&sigma_powers);
        let mut inner = b;
        if order >= 2 {
            let sigma_ad = ad_powers(&y, &sigma);
            inner.axpy(-0.5, &ddexp_diag(&sigma_ad));
        }
        let mu = dexp_inv(&ad_powers(&y, &inner));

        y.axpy(dt, &mu);
        y.axpy(path.increment(0, k), &sigma);
        for (g, column) in terms.iter_mut().enumerate() {
            column.push(y.total(g + 1));
        }
    }
    Ok(MagnusTerms::new(grid, (0..=n).collect(), terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_are_dense_and_unique() {
        let mut seen = vec![false; 9];
        for g in 1..=3 {
            for r in 0..=g {
                let i = slot(r, g - r);
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn truncated_product_drops_high_degrees() {
        let m = Matrix::from_rows(&[[0.0, 1.0], [2.0, 0.0]]).unwrap();
        let x = Graded::monomial(2, 1, 0, m.clone());
        let sq = x.mul(&x);
        assert_eq!(sq.get(2, 0).unwrap(), &(&m * &m));
        let cube = sq.mul(&x);
        assert!(cube.parts.iter().all(Option::is_none));
    }
}

use super::Matrix;

/// Compressed sparse row copy of a square [`Matrix`].
///
/// Only used to multiply dense matrices from the left; banded operators from
/// the SPDE discretisation have a few nonzeros per row, so `S · X` costs
/// `O(nnz · d)` instead of `O(d³)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_dense(m: &Matrix) -> Self {
        let dim = m.dim();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..dim {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `out += scale · S · x`. Dimensions are the caller's responsibility.
    pub fn mul_add_into(&self, scale: f64, x: &Matrix, out: &mut Matrix) {
        let d = self.dim;
        debug_assert_eq!(x.dim(), d);
        debug_assert_eq!(out.dim(), d);
        if scale == 0.0 {
            return;
        }
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for i in 0..d {
            let dst = &mut os[i * d..(i + 1) * d];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = scale * self.vals[p];
                let src = &xs[self.cols[p] * d..(self.cols[p] + 1) * d];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_product() {
        let s = Matrix::from_rows(&[[1.0, 0.0, 2.0], [0.0, 0.0, 0.0], [-1.0, 3.0, 0.0]]).unwrap();
        let x = Matrix::from_fn(3, |i, j| (i * 3 + j) as f64 - 4.0);
        let csr = CsrMatrix::from_dense(&s);
        assert_eq!(csr.nnz(), 4);
        let mut out = Matrix::identity(3);
        csr.mul_add_into(0.5, &x, &mut out);
        let mut expected = (&s * &x).scaled(0.5);
        expected += &Matrix::identity(3);
        assert_eq!(out, expected);
    }
}

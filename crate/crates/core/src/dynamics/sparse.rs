//! Coordinate-format operator used for matrix-free Liouvillian application.

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::scalar::{Real, C};

#[derive(Clone, Debug)]
pub(crate) struct Sparse<T: Real> {
    pub dim: usize,
    /// `(row, col, value)`, sorted by column then row.
    pub entries: Vec<(usize, usize, C<T>)>,
}

impl<T: Real> Sparse<T> {
    pub fn from_dense(m: &DMatrix<C<T>>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if !v.is_zero() {
                    entries.push((i, j, v));
                }
            }
        }
        Self {
            dim: m.nrows(),
            entries,
        }
    }

    /// `out += factor · S X`.
    pub fn left_mul_acc(&self, x: &DMatrix<C<T>>, factor: C<T>, out: &mut DMatrix<C<T>>) {
        let n = self.dim;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for &(i, j, v) in &self.entries {
            let s = v * factor;
            for col in 0..n {
                os[i + col * n] += s * xs[j + col * n];
            }
        }
    }

    /// `out += factor · X S†`.
    pub fn right_mul_adjoint_acc(&self, x: &DMatrix<C<T>>, factor: C<T>, out: &mut DMatrix<C<T>>) {
        let n = self.dim;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        // (X S†)[:, i] += conj(S[i, j]) X[:, j]
        for &(i, j, v) in &self.entries {
            let s = v.conj() * factor;
            let (src, dst) = (j * n, i * n);
            for r in 0..n {
                os[dst + r] += s * xs[src + r];
            }
        }
    }

    /// `S X` as a new matrix.
    pub fn left_mul(&self, x: &DMatrix<C<T>>) -> DMatrix<C<T>> {
        let mut out = DMatrix::zeros(self.dim, x.ncols());
        self.left_mul_acc(x, C::new(T::one(), T::zero()), &mut out);
        out
    }
}

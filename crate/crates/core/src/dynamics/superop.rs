//! Vectorised representations of the Liouvillian.
//!
//! Two dense forms are available. The complex form acts on column-major
//! `vec(ρ)` (`vec(ρ)[i + j·d] = ρ_ij`). The real form acts on the coordinates
//! of a Hermitian operator in the orthonormal basis
//!
//! * `E_jj` at position `j + j·d`,
//! * `(E_pq + E_qp)/√2` at `p + q·d` and `(−iE_pq + iE_qp)/√2` at `q + p·d`, for `p < q`,
//!
//! and is real because the Liouvillian preserves Hermiticity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::scalar::{Real, C};

/// Coordinates `tr(B_μ X)` of a Hermitian matrix.
pub(crate) fn to_real<T: Real>(x: &DMatrix<C<T>>) -> DVector<T> {
    let d = x.nrows();
    let s2 = T::lit(2.0).sqrt();
    let mut v = DVector::zeros(d * d);
    for q in 0..d {
        v[q + q * d] = x[(q, q)].re;
        for p in 0..q {
            let z = x[(p, q)];
            v[p + q * d] = s2 * z.re;
            v[q + p * d] = -s2 * z.im;
        }
    }
    v
}

pub(crate) fn from_real<T: Real>(v: &[T], d: usize) -> DMatrix<C<T>> {
    let inv = T::one() / T::lit(2.0).sqrt();
    let mut x = DMatrix::zeros(d, d);
    for q in 0..d {
        x[(q, q)] = Complex::new(v[q + q * d], T::zero());
        for p in 0..q {
            let z = Complex::new(v[p + q * d] * inv, -v[q + p * d] * inv);
            x[(p, q)] = z;
            x[(q, p)] = z.conj();
        }
    }
    x
}

/// Basis element `B_μ`.
pub(crate) fn basis_element<T: Real>(mu: usize, d: usize) -> DMatrix<C<T>> {
    let mut v = vec![T::zero(); d * d];
    v[mu] = T::one();
    from_real(&v, d)
}

/// Real and imaginary parts of the functional `X ↦ tr(A X)` in Hermitian coordinates.
pub(crate) fn functional<T: Real>(a: &DMatrix<C<T>>) -> (DVector<T>, DVector<T>) {
    let d = a.nrows();
    let inv = T::one() / T::lit(2.0).sqrt();
    let i = Complex::new(T::zero(), T::one());
    let mut re = DVector::zeros(d * d);
    let mut im = DVector::zeros(d * d);
    for q in 0..d {
        let z = a[(q, q)];
        re[q + q * d] = z.re;
        im[q + q * d] = z.im;
        for p in 0..q {
            let s = (a[(q, p)] + a[(p, q)]) * inv;
            let t = (-i * a[(q, p)] + i * a[(p, q)]) * inv;
            re[p + q * d] = s.re;
            im[p + q * d] = s.im;
            re[q + p * d] = t.re;
            im[q + p * d] = t.im;
        }
    }
    (re, im)
}

/// Splits `X = H₁ + iH₂` into Hermitian parts.
pub(crate) fn split_hermitian<T: Real>(x: &DMatrix<C<T>>) -> (DMatrix<C<T>>, DMatrix<C<T>>) {
    let half = Complex::new(T::lit(0.5), T::zero());
    let minus_half_i = Complex::new(T::zero(), T::lit(-0.5));
    let xa = x.adjoint();
    ((x + &xa) * half, (x - &xa) * minus_half_i)
}

/// Trace functional in Hermitian coordinates.
pub(crate) fn trace_functional<T: Real>(d: usize) -> DVector<T> {
    let mut t = DVector::zeros(d * d);
    for j in 0..d {
        t[j + j * d] = T::one();
    }
    t
}

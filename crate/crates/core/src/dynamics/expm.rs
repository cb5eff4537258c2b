//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant
//! (Higham 2005).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

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

const THETA13: f64 = 5.371_920_351_148_152;

fn one_norm<T: Real>(a: &DMatrix<T>) -> T {
    a.column_iter()
        .map(|c| c.iter().fold(T::zero(), |acc, x| acc + x.abs()))
        .fold(T::zero(), |acc, x| acc.max(x))
}

/// `exp(A)` for a real square matrix.
pub(crate) fn expm<T: Real>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Argument("matrix exponential of a non-finite matrix".into()));
    }
    let ratio = norm.to_f64_lossy() / THETA13;
    let squarings = if ratio > 1.0 { ratio.log2().ceil() as u32 } else { 0 };
    let a = a * T::lit(0.5f64.powi(squarings as i32));

    let b = |k: usize| T::lit(PADE13[k]);
    let id = DMatrix::<T>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_poly = &a6 * &inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_poly;
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * &inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    drop((a2, a4, a6, inner_u, inner_v, id));

    let p = &v + &u;
    let q = v - u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Validation("Padé denominator is singular".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

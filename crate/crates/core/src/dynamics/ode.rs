//! Adaptive Dormand–Prince 5(4) integration of `dX/dt = L(X)`.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::Liouvillian;
use crate::error::{Error, Result};
use crate::scalar::{cabs, Real, C};

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// difference between the fifth- and fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrator state carried across output times.
pub(crate) struct Dopri<'a, T: Real> {
    l: &'a Liouvillian<T>,
    rtol: T,
    atol: T,
    h: Option<T>,
    fsal: Option<DMatrix<C<T>>>,
    pub steps: usize,
}

fn combo<T: Real>(y: &DMatrix<C<T>>, h: T, coefs: &[f64], ks: &[DMatrix<C<T>>]) -> DMatrix<C<T>> {
    let mut out = y.clone();
    for (&a, k) in coefs.iter().zip(ks) {
        if a != 0.0 {
            let f = Complex::new(h * T::lit(a), T::zero());
            out.zip_apply(k, |o, x| *o += f * x);
        }
    }
    out
}

fn max_abs<T: Real>(m: &DMatrix<C<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

impl<'a, T: Real> Dopri<'a, T> {
    pub fn new(l: &'a Liouvillian<T>, rtol: T, atol: T) -> Self {
        Self {
            l,
            rtol,
            atol,
            h: None,
            fsal: None,
            steps: 0,
        }
    }

    fn initial_step(&self, y: &DMatrix<C<T>>, f0: &DMatrix<C<T>>) -> T {
        let d0 = max_abs(y);
        let d1 = max_abs(f0);
        let small = T::lit(1e-5);
        if d0 < small || d1 < small {
            T::lit(1e-4)
        } else {
            T::lit(0.01) * d0 / d1
        }
    }

    /// Advances `y` from `t` to `t_end`.
    pub fn advance(&mut self, y: &mut DMatrix<C<T>>, t: &mut T, t_end: T) -> Result<()> {
        let eps = T::default_epsilon();
        while *t < t_end {
            let k1 = match self.fsal.take() {
                Some(k) => k,
                None => self.l.apply(y),
            };
            let mut h = match self.h {
                Some(h) => h,
                None => self.initial_step(y, &k1),
            };
            let remaining = t_end - *t;
            let clipped = h >= remaining;
            if clipped {
                h = remaining;
            }
            if h <= T::lit(16.0) * eps * t.abs().max(T::one()) {
                return Err(Error::Stiffness {
                    t: t.to_f64_lossy(),
                    h: h.to_f64_lossy(),
                });
            }

            let mut ks = vec![k1];
            for row in [&A2[..], &A3[..], &A4[..], &A5[..], &A6[..]] {
                let stage = combo(y, h, row, &ks);
                ks.push(self.l.apply(&stage));
            }
            let y_new = combo(y, h, &B, &ks);
            let k7 = self.l.apply(&y_new);
            ks.push(k7);

            let mut err = T::zero();
            let n = y.len();
            for idx in 0..n {
                let mut e = Complex::new(T::zero(), T::zero());
                for (s, k) in ks.iter().enumerate() {
                    if E[s] != 0.0 {
                        e += k[idx] * T::lit(E[s]);
                    }
                }
                let scale = self.atol + self.rtol * cabs(y[idx]).max(cabs(y_new[idx]));
                err = err.max(cabs(e) * h / scale);
            }
            if !err.is_finite() {
                return Err(Error::Stiffness {
                    t: t.to_f64_lossy(),
                    h: h.to_f64_lossy(),
                });
            }

            let fifth = T::lit(-0.2);
            if err <= T::one() {
                *t = if clipped { t_end } else { *t + h };
                *y = y_new;
                self.fsal = ks.pop();
                self.steps += 1;
                let fac = if err > T::zero() {
                    (T::lit(0.9) * err.powf(fifth)).min(T::lit(5.0)).max(T::lit(0.2))
                } else {
                    T::lit(5.0)
                };
                // a step shortened to hit an output time does not shrink the next one
                if !clipped || self.h.is_none() {
                    self.h = Some(h * fac);
                } else if let Some(prev) = self.h {
                    self.h = Some(prev.max(h * fac));
                }
            } else {
                let fac = (T::lit(0.9) * err.powf(fifth)).max(T::lit(0.2)).min(T::one());
                self.fsal = Some(ks.swap_remove(0));
                self.h = Some(h * fac);
            }
        }
        Ok(())
    }
}

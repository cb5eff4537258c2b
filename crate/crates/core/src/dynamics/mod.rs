//! Lindblad dynamics: Liouvillian construction, propagation, steady states
//! and two-time correlations.
//!
//! `dρ/dt = −i[H, ρ] + Σ_c r_c (cρc† − ½{c†c, ρ})`

mod expm;
mod ode;
mod propagate;
mod sparse;
pub(crate) mod superop;

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, hermitian_defect, max_abs, pauli, qubit_lowering, DensityMatrix, PauliAxis, QOperator, SpaceSpec};
use crate::scalar::{cr, Real, C};
use sparse::Sparse;

pub use propagate::{correlation, evolve, evolve_expect, steady_state, EvolveOptions, ExpectationSeries, Method, Trajectory};
pub(crate) use propagate::{propagate_functionals, Stepper};
pub use propagate::MAX_EXPONENTIAL_DIM;

/// Dissipation rates in units of ω₁.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DissipationParams<T> {
    pub kappa1: T,
    pub kappa2: T,
    pub gamma: T,
    pub gamma_phi: T,
    /// Mean thermal photon number of the resonator baths.
    pub n_th: T,
}

impl<T: Real> Default for DissipationParams<T> {
    /// Balanced dissipation: κ₁ = κ₂ = γ = 0.001, γ_φ = 0.01, n_th = 0.15.
    fn default() -> Self {
        Self {
            kappa1: T::lit(0.001),
            kappa2: T::lit(0.001),
            gamma: T::lit(0.001),
            gamma_phi: T::lit(0.01),
            n_th: T::lit(0.15),
        }
    }
}

impl<T: Real> DissipationParams<T> {
    pub fn zero() -> Self {
        Self {
            kappa1: T::zero(),
            kappa2: T::zero(),
            gamma: T::zero(),
            gamma_phi: T::zero(),
            n_th: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.kappa1, self.kappa2, self.gamma, self.gamma_phi, self.n_th];
        if all.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::Argument(format!(
                "dissipation rates and n_th must be finite and nonnegative: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Collapse operator `op` with rate `rate`, contributing `rate·D[op]`.
#[derive(Clone, Debug)]
pub struct Channel<T: Real> {
    pub rate: T,
    pub op: QOperator<T>,
}

/// Generator of the master equation. Immutable after construction; the dense
/// superoperator forms are materialised on first use.
#[derive(Clone, Debug)]
pub struct Liouvillian<T: Real> {
    space: SpaceSpec,
    hamiltonian: QOperator<T>,
    channels: Vec<Channel<T>>,
    h_eff: Sparse<T>,
    jumps: Vec<(T, Sparse<T>)>,
    dense: OnceLock<DMatrix<C<T>>>,
    real: OnceLock<DMatrix<T>>,
}

impl<T: Real> Liouvillian<T> {
    /// Generic constructor; zero-rate channels are dropped.
    pub fn new(hamiltonian: QOperator<T>, channels: Vec<Channel<T>>) -> Result<Self> {
        if !hamiltonian.is_hermitian() {
            return Err(Error::Validation(format!(
                "Hamiltonian is not Hermitian (defect {:.3e})",
                hermitian_defect(hamiltonian.matrix()).to_f64_lossy()
            )));
        }
        let space = hamiltonian.space().clone();
        let mut kept = Vec::new();
        for ch in channels {
            hamiltonian.check_space(&ch.op)?;
            if !ch.rate.is_finite() || ch.rate < T::zero() {
                return Err(Error::Argument(format!("channel rate {} must be nonnegative", ch.rate)));
            }
            if ch.rate > T::zero() {
                kept.push(ch);
            }
        }
        let half_i = Complex::new(T::zero(), T::lit(0.5));
        let mut h_eff = hamiltonian.matrix().clone();
        let mut jumps = Vec::with_capacity(kept.len());
        for ch in &kept {
            let m = ch.op.matrix();
            h_eff -= (m.adjoint() * m) * (half_i * ch.rate);
            jumps.push((ch.rate, Sparse::from_dense(m)));
        }
        Ok(Self {
            space,
            h_eff: Sparse::from_dense(&h_eff),
            hamiltonian,
            channels: kept,
            jumps,
            dense: OnceLock::new(),
            real: OnceLock::new(),
        })
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn hamiltonian(&self) -> &QOperator<T> {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[Channel<T>] {
        &self.channels
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    /// Smallest positive channel rate, if any.
    pub fn min_rate(&self) -> Option<T> {
        self.channels.iter().map(|c| c.rate).reduce(|a, b| a.min(b))
    }

    /// `L(X)` for an arbitrary (not necessarily Hermitian) matrix.
    pub fn apply(&self, x: &DMatrix<C<T>>) -> DMatrix<C<T>> {
        let d = self.dim();
        let i = Complex::new(T::zero(), T::one());
        let mut out = DMatrix::zeros(d, d);
        self.h_eff.left_mul_acc(x, -i, &mut out);
        self.h_eff.right_mul_adjoint_acc(x, i, &mut out);
        for (rate, c) in &self.jumps {
            let cx = c.left_mul(x);
            c.right_mul_adjoint_acc(&cx, cr(*rate), &mut out);
        }
        out
    }

    /// `‖L(ρ)‖∞` (largest entry modulus).
    pub fn residual(&self, rho: &DensityMatrix<T>) -> T {
        max_abs(&self.apply(rho.matrix()))
    }

    /// Dense superoperator acting on column-major `vec(ρ)`, side `d²`.
    pub fn matrix(&self) -> &DMatrix<C<T>> {
        self.dense.get_or_init(|| self.build_dense())
    }

    /// Real superoperator on Hermitian-basis coordinates, side `d²`.
    pub(crate) fn real_form(&self) -> &DMatrix<T> {
        self.real.get_or_init(|| {
            let d = self.dim();
            let n = d * d;
            let mut r = DMatrix::zeros(n, n);
            for nu in 0..n {
                let image = self.apply(&superop::basis_element(nu, d));
                r.set_column(nu, &superop::to_real(&image));
            }
            r
        })
    }

    fn build_dense(&self) -> DMatrix<C<T>> {
        let d = self.dim();
        let n = d * d;
        let i = Complex::new(T::zero(), T::one());
        let mut l = DMatrix::zeros(n, n);
        for &(r, k, v) in &self.h_eff.entries {
            for j in 0..d {
                l[(r + j * d, k + j * d)] -= i * v;
            }
        }
        for &(j, k, v) in &self.h_eff.entries {
            for r in 0..d {
                l[(r + j * d, r + k * d)] += i * v.conj();
            }
        }
        for (rate, c) in &self.jumps {
            for &(r, k, v) in &c.entries {
                for &(j, m, w) in &c.entries {
                    l[(r + j * d, k + m * d)] += v * w.conj() * *rate;
                }
            }
        }
        l
    }
}

/// Liouvillian of the two-resonator + qubit system:
///
/// `L = −i[H,·] + Σ_j (1+n_th)κ_j D[α_j] + n_th κ_j D[α†_j] + γ D[σ] + (γ_φ/2) D[σ_z]`.
///
/// Thermal occupation enters the resonator channels only.
pub fn build_liouvillian<T: Real>(h: &QOperator<T>, d: &DissipationParams<T>) -> Result<Liouvillian<T>> {
    h.space().require_two_modes_one_qubit()?;
    d.validate()?;
    let space = h.space();
    let mut channels = Vec::new();
    for (mode, kappa) in [(0, d.kappa1), (1, d.kappa2)] {
        let a = annihilation::<T>(space, mode)?;
        channels.push(Channel {
            rate: (T::one() + d.n_th) * kappa,
            op: a.clone(),
        });
        channels.push(Channel {
            rate: d.n_th * kappa,
            op: a.adjoint(),
        });
    }
    channels.push(Channel {
        rate: d.gamma,
        op: qubit_lowering(space, 0)?,
    });
    channels.push(Channel {
        rate: d.gamma_phi / T::lit(2.0),
        op: pauli(space, PauliAxis::Z, 0)?,
    });
    Liouvillian::new(h.clone(), channels)
}

/// Channels of a thermal bath `(1+n)κ D[a] + nκ D[a†]` on mode `mode`.
pub fn thermal_channels<T: Real>(space: &SpaceSpec, mode: usize, kappa: T, n_th: T) -> Result<Vec<Channel<T>>> {
    let a = annihilation::<T>(space, mode)?;
    Ok(vec![
        Channel {
            rate: (T::one() + n_th) * kappa,
            op: a.clone(),
        },
        Channel {
            rate: n_th * kappa,
            op: a.adjoint(),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{number, QubitLevel};
    use crate::model::build_dimensionless_hamiltonian;

    fn model_l(k: f64, delta: f64, d: DissipationParams<f64>) -> Liouvillian<f64> {
        let space = SpaceSpec::two_modes_one_qubit(2, 2).unwrap();
        let h = build_dimensionless_hamiltonian(&space, k, delta, true, None).unwrap();
        build_liouvillian(&h, &d).unwrap()
    }

    #[test]
    fn dense_matches_matrix_free_action() {
        let l = model_l(0.3, 0.4, DissipationParams { kappa1: 0.1, kappa2: 0.05, gamma: 0.02, gamma_phi: 0.03, n_th: 0.2 });
        let d = l.dim();
        let x = DMatrix::from_fn(d, d, |i, j| C::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.3));
        let y = l.apply(&x);
        let vy = l.matrix() * DMatrix::from_column_slice(d * d, 1, x.as_slice());
        assert!(y.as_slice().iter().zip(vy.as_slice()).all(|(a, b)| (a - b).norm() < 1e-13));
    }

    #[test]
    fn trace_preserving_columns() {
        let l = model_l(0.5, -0.3, DissipationParams::default());
        let d = l.dim();
        let m = l.matrix();
        for col in 0..d * d {
            let mut s = C::new(0.0, 0.0);
            for j in 0..d {
                s += m[(j + j * d, col)];
            }
            assert!(s.norm() <= 1e-12, "column {col}: {s}");
        }
    }

    #[test]
    fn unitary_limit_is_commutator() {
        let l = model_l(0.2, 0.1, DissipationParams::zero());
        assert!(l.channels().is_empty());
        let rho = DensityMatrix::basis_state(l.space(), &[1, 0], &[QubitLevel::Excited]).unwrap();
        let h = l.hamiltonian();
        let want = (h.matrix() * rho.matrix() - rho.matrix() * h.matrix()) * C::new(0.0, -1.0);
        assert!((l.apply(rho.matrix()) - want).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn rejects_non_hermitian_and_bad_rates() {
        let space = SpaceSpec::two_modes_one_qubit(2, 2).unwrap();
        let a = annihilation::<f64>(&space, 0).unwrap();
        assert!(matches!(build_liouvillian(&a, &DissipationParams::default()), Err(Error::Validation(_))));
        let h = number::<f64>(&space, 0).unwrap();
        let d = DissipationParams {
            gamma: -1.0,
            ..DissipationParams::default()
        };
        assert!(build_liouvillian(&h, &d).is_err());
    }

    #[test]
    fn real_form_matches_complex_form() {
        let l = model_l(0.3, 0.2, DissipationParams { kappa1: 0.1, kappa2: 0.2, gamma: 0.05, gamma_phi: 0.1, n_th: 0.3 });
        let d = l.dim();
        let x = DMatrix::from_fn(d, d, |i, j| C::new(((i * j) % 5) as f64 * 0.2, 0.0) + C::new(0.0, (i as f64 - j as f64) * 0.1));
        let x = (&x + x.adjoint()) * C::new(0.5, 0.0);
        let via_real = superop::from_real(
            (l.real_form() * superop::to_real(&x)).as_slice(),
            d,
        );
        assert!((via_real - l.apply(&x)).iter().all(|z| z.norm() < 1e-13));
    }
}

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_expect, EvolveOptions, Liouvillian};
use crate::error::{Error, Result};
use crate::hilbert::{number, DensityMatrix};
use crate::scalar::Real;

/// Photon numbers of the two resonators and `z = (n₁ − n₂)/(n₁ + n₂)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceSeries<T> {
    pub times: Vec<T>,
    pub n1: Vec<T>,
    pub n2: Vec<T>,
    pub n_total: Vec<T>,
    /// `None` where `n₁ + n₂ ≤ 1e-12`.
    pub z: Vec<Option<T>>,
}

/// Window statistics of `z(t)` used to classify trapping behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceSummary<T> {
    /// Sign changes of `z` over the whole series.
    pub sign_changes: usize,
    pub early_max_abs: T,
    pub late_min: T,
    pub late_max: T,
    pub late_max_abs: T,
    pub late_sign_changes: usize,
}

fn sign_changes<T: Real>(z: &[T]) -> usize {
    let signs: Vec<bool> = z.iter().filter(|v| !v.is_zero()).map(|v| *v > T::zero()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

impl<T: Real> ImbalanceSeries<T> {
    /// Statistics over the first and last `fraction` of the samples where `z`
    /// is defined. `None` if fewer than two such samples exist.
    pub fn summary(&self, fraction: T) -> Option<ImbalanceSummary<T>> {
        let z: Vec<T> = self.z.iter().flatten().copied().collect();
        if z.len() < 2 || !(fraction > T::zero() && fraction <= T::one()) {
            return None;
        }
        let w = (T::lit(z.len() as f64) * fraction).ceil().to_f64_lossy().max(1.0) as usize;
        let early = &z[..w];
        let late = &z[z.len() - w..];
        let fold = |s: &[T], f: fn(T, T) -> T, init: T| s.iter().fold(init, |a, &b| f(a, b));
        Some(ImbalanceSummary {
            sign_changes: sign_changes(&z),
            early_max_abs: early.iter().fold(T::zero(), |a, b| a.max(b.abs())),
            late_min: fold(late, |a, b| a.min(b), T::one()),
            late_max: fold(late, |a, b| a.max(b), -T::one()),
            late_max_abs: late.iter().fold(T::zero(), |a, b| a.max(b.abs())),
            late_sign_changes: sign_changes(late),
        })
    }
}

pub fn imbalance<T: Real>(
    l: &Liouvillian<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
    opts: &EvolveOptions<T>,
) -> Result<ImbalanceSeries<T>> {
    if l.space().mode_count() < 2 {
        return Err(Error::Argument("imbalance needs two resonator modes".into()));
    }
    let n1_op = number(l.space(), 0)?;
    let n2_op = number(l.space(), 1)?;
    let series = evolve_expect(l, rho0, times, &[&n1_op, &n2_op], opts)?;
    let n1: Vec<T> = series.values[0].iter().map(|v| v.re).collect();
    let n2: Vec<T> = series.values[1].iter().map(|v| v.re).collect();
    let n_total: Vec<T> = n1.iter().zip(&n2).map(|(&a, &b)| a + b).collect();
    let floor = T::lit(1e-12);
    let z = n1
        .iter()
        .zip(&n2)
        .zip(&n_total)
        .map(|((&a, &b), &n)| (n > floor).then(|| ((a - b) / n).max(-T::one()).min(T::one())))
        .collect();
    Ok(ImbalanceSeries {
        times: series.times,
        n1,
        n2,
        n_total,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_liouvillian, DissipationParams};
    use crate::hilbert::{QubitLevel, SpaceSpec};
    use crate::model::build_dimensionless_hamiltonian;
    use crate::scalar::C;
    use nalgebra::DVector;

    #[test]
    fn starts_fully_imbalanced() {
        let space = SpaceSpec::two_modes_one_qubit(3, 3).unwrap();
        let h = build_dimensionless_hamiltonian(&space, 0.1, 0.1, true, None).unwrap();
        let l = build_liouvillian(&h, &DissipationParams::default()).unwrap();
        let rho = DensityMatrix::basis_state(&space, &[1, 0], &[QubitLevel::Excited]).unwrap();
        let s = imbalance(&l, &rho, &[0.0, 5.0, 50.0], &EvolveOptions::default()).unwrap();
        assert_eq!(s.z[0], Some(1.0));
        assert!(s.z.iter().flatten().all(|z: &f64| z.abs() <= 1.0));
    }

    #[test]
    fn summary_windows() {
        let s = ImbalanceSeries {
            times: (0..8).map(|t| t as f64).collect(),
            n1: vec![0.0; 8],
            n2: vec![0.0; 8],
            n_total: vec![0.0; 8],
            z: vec![Some(1.0), Some(-0.8), None, Some(0.6), Some(-0.4), Some(0.3), Some(0.2), Some(-0.1)],
        };
        let m = s.summary(0.25).unwrap();
        assert_eq!(m.sign_changes, 5);
        assert_eq!(m.early_max_abs, 1.0);
        assert_eq!((m.late_min, m.late_max, m.late_max_abs), (-0.1, 0.2, 0.2));
        assert_eq!(m.late_sign_changes, 1);
        assert!(s.summary(0.0).is_none());
    }

    #[test]
    fn empty_resonators_have_no_imbalance() {
        let space = SpaceSpec::two_modes_one_qubit(2, 2).unwrap();
        let h = build_dimensionless_hamiltonian(&space, 0.0, 0.0, true, None).unwrap();
        let l = build_liouvillian(&h, &DissipationParams { n_th: 0.0, ..DissipationParams::default() }).unwrap();
        let rho = DensityMatrix::basis_state(&space, &[0, 0], &[QubitLevel::Ground]).unwrap();
        let s = imbalance(&l, &rho, &[0.0, 1.0], &EvolveOptions::default()).unwrap();
        assert_eq!(s.z, vec![None, None]);
    }

    #[test]
    fn symmetric_state_stays_balanced() {
        let space = SpaceSpec::two_modes_one_qubit(3, 3).unwrap();
        // k = 0 keeps the mode exchange symmetry at Δ = 0
        let h = build_dimensionless_hamiltonian(&space, 0.0, 0.0, true, Some(0.3)).unwrap();
        let l = build_liouvillian(&h, &DissipationParams::default()).unwrap();
        let mut psi = DVector::<C<f64>>::zeros(space.total_dim());
        let s = 0.5f64.sqrt();
        psi[space.basis_index(&[1, 0], &[QubitLevel::Ground]).unwrap()] = C::new(s, 0.0);
        psi[space.basis_index(&[0, 1], &[QubitLevel::Ground]).unwrap()] = C::new(s, 0.0);
        let rho = DensityMatrix::pure(&space, &psi).unwrap();
        let times: Vec<f64> = (0..20).map(|j| j as f64 * 3.0).collect();
        let series = imbalance(&l, &rho, &times, &EvolveOptions::exponential()).unwrap();
        assert!(series.z.iter().flatten().all(|z| z.abs() < 1e-10));
    }
}

//! Hamiltonians of the two-resonator flux-qubit Jahn-Teller circuit.
//!
//! Three builders are provided:
//!
//! * [`build_raw_hamiltonian`]: resonators with linear `λ_i` and quadratic
//!   `g_i` couplings to σ_x.
//! * [`build_effective_hamiltonian`]: the privileged/disadvantaged mode form
//!   with the derived parameters of [`derive_effective`].
//! * [`build_dimensionless_hamiltonian`]: the `(k, Δ)` form used by every
//!   figure pipeline. Energies are in units of the first resonator frequency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, number, pauli, quadrature, PauliAxis, QOperator, SpaceSpec};
use crate::scalar::Real;

/// Physical parameters of the circuit, in units of `ω₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    /// Qubit splitting ω.
    pub omega_q: T,
    pub omega_1: T,
    pub omega_2: T,
    /// Dimensionless JT scaling factors.
    pub k1: T,
    pub k2: T,
    /// Linear qubit couplings.
    pub lambda_1: T,
    pub lambda_2: T,
    /// Quadratic qubit couplings.
    pub g1: T,
    pub g2: T,
    /// Frequency mismatch `ω₁ − ω₂`; set by the constructors.
    pub delta: T,
    /// Inter-resonator hopping J.
    pub j_hop: T,
    /// Common scaling factor of the dimensionless model.
    pub k: T,
}

impl<T: Real> ModelParams<T> {
    /// Bare frequencies with every coupling switched off.
    pub fn new(omega_q: T, omega_1: T, omega_2: T) -> Self {
        Self {
            omega_q,
            omega_1,
            omega_2,
            k1: T::zero(),
            k2: T::zero(),
            lambda_1: T::zero(),
            lambda_2: T::zero(),
            g1: T::zero(),
            g2: T::zero(),
            delta: omega_1 - omega_2,
            j_hop: T::zero(),
            k: T::zero(),
        }
    }

    /// Symmetric JT couplings `k₁ = k₂ = k` with the induced linear couplings
    /// `λ₁ = (ω₁+ω₂)k/√2`, `λ₂ = Δk/√2` and hopping `J = c₂ = Δ/2`.
    pub fn symmetric(omega_q: T, omega_1: T, omega_2: T, k: T) -> Self {
        let mut p = Self::new(omega_q, omega_1, omega_2);
        let sqrt2 = T::lit(2.0).sqrt();
        p.k = k;
        p.k1 = k;
        p.k2 = k;
        p.lambda_1 = (omega_1 + omega_2) * k / sqrt2;
        p.lambda_2 = p.delta * k / sqrt2;
        p.j_hop = p.delta / T::lit(2.0);
        p
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega_q,
            self.omega_1,
            self.omega_2,
            self.k1,
            self.k2,
            self.lambda_1,
            self.lambda_2,
            self.g1,
            self.g2,
            self.delta,
            self.j_hop,
            self.k,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("model parameters must be finite".into()));
        }
        if self.k1 < T::zero() || self.k2 < T::zero() {
            return Err(Error::Argument("JT scaling factors must be nonnegative".into()));
        }
        let expected = self.omega_1 - self.omega_2;
        let scale = T::one().max(self.omega_1.abs()).max(self.omega_2.abs());
        if (self.delta - expected).abs() > T::tol(1e-12) * scale {
            return Err(Error::Argument(format!(
                "delta = {} but omega_1 - omega_2 = {}",
                self.delta, expected
            )));
        }
        Ok(())
    }
}

/// Denominator used for `ω_eff` and `ω′`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectiveNormalization {
    /// Divide by `k_eff`.
    #[default]
    AsPrinted,
    /// Divide by `k_eff²`, which makes `ω_eff` a weighted mean frequency.
    Obrien,
}

/// Parameters of the privileged (α₁) / disadvantaged (α₂) mode picture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams<T> {
    pub omega_eff: T,
    pub k_eff: T,
    pub omega_prime: T,
    pub c2: T,
}

/// `k_eff = √(k₁²+k₂²)`, `ω_eff = (ω₁k₁²+ω₂k₂²)/N`, `ω′ = (ω₁k₂²+ω₂k₁²)/N`,
/// `c₂ = Δk₁k₂/k_eff²`, with `N` chosen by `normalization`.
pub fn derive_effective<T: Real>(
    p: &ModelParams<T>,
    normalization: EffectiveNormalization,
) -> Result<EffectiveParams<T>> {
    p.validate()?;
    let k_eff_sq = p.k1 * p.k1 + p.k2 * p.k2;
    if k_eff_sq <= T::zero() {
        return Err(Error::DegenerateModel(
            "effective mode needs k1^2 + k2^2 > 0".into(),
        ));
    }
    let k_eff = k_eff_sq.sqrt();
    let denom = match normalization {
        EffectiveNormalization::AsPrinted => k_eff,
        EffectiveNormalization::Obrien => k_eff_sq,
    };
    let (w1, w2) = (p.omega_1, p.omega_2);
    let (k1s, k2s) = (p.k1 * p.k1, p.k2 * p.k2);
    Ok(EffectiveParams {
        omega_eff: (w1 * k1s + w2 * k2s) / denom,
        k_eff,
        omega_prime: (w1 * k2s + w2 * k1s) / denom,
        c2: p.delta * p.k1 * p.k2 / k_eff_sq,
    })
}

/// `H = (ω/2)σ_z + Σ_i [ω_i a†_i a_i + λ_i (a_i+a†_i)σ_x + g_i (a_i+a†_i)² σ_x]`.
pub fn build_raw_hamiltonian<T: Real>(space: &SpaceSpec, p: &ModelParams<T>) -> Result<QOperator<T>> {
    space.require_two_modes_one_qubit()?;
    p.validate()?;
    let sz = pauli::<T>(space, PauliAxis::Z, 0)?;
    let sx = pauli::<T>(space, PauliAxis::X, 0)?;
    let mut h = sz.scale_real(p.omega_q / T::lit(2.0));
    let modes = [(p.omega_1, p.lambda_1, p.g1), (p.omega_2, p.lambda_2, p.g2)];
    for (i, (omega, lambda, g)) in modes.into_iter().enumerate() {
        let x = quadrature::<T>(space, i)?;
        let x2 = &x * &x;
        h = h + number::<T>(space, i)?.scale_real(omega);
        h = h + (&x * &sx).scale_real(lambda);
        h = h + (&x2 * &sx).scale_real(g);
    }
    Ok(h)
}

/// The `(k, Δ)` Hamiltonian
///
/// `H = n₁ + n₂ + ½σ_z + J(α†₁α₂+α†₂α₁)
///    + √2k[x₁ + x₁² + (Δ/2)(x₂ + x₂²)]σ_x`, with `x_i = α_i + α†_i`.
///
/// `J = Δ/2` unless `j_override` is given. With `include_quadratic` off the
/// squared quadratures are dropped.
pub fn build_dimensionless_hamiltonian<T: Real>(
    space: &SpaceSpec,
    k: T,
    delta: T,
    include_quadratic: bool,
    j_override: Option<T>,
) -> Result<QOperator<T>> {
    space.require_two_modes_one_qubit()?;
    if !k.is_finite() || !delta.is_finite() || j_override.is_some_and(|j| !j.is_finite()) {
        return Err(Error::Argument("k, delta and J must be finite".into()));
    }
    let half = T::lit(0.5);
    let hop = j_override.unwrap_or(delta * half);
    let a1 = annihilation::<T>(space, 0)?;
    let a2 = annihilation::<T>(space, 1)?;
    let x1 = &a1 + &a1.adjoint();
    let x2 = &a2 + &a2.adjoint();
    let sx = pauli::<T>(space, PauliAxis::X, 0)?;
    let sz = pauli::<T>(space, PauliAxis::Z, 0)?;

    let mut h = &number::<T>(space, 0)? + &number::<T>(space, 1)?;
    h = h + sz.scale_real(half);
    h = h + (&(&a1.adjoint() * &a2) + &(&a2.adjoint() * &a1)).scale_real(hop);

    let mut field = x1.clone();
    let mut second = x2.clone();
    if include_quadratic {
        field = &field + &(&x1 * &x1);
        second = &second + &(&x2 * &x2);
    }
    field = &field + &second.scale_real(delta * half);
    let coupling = T::lit(2.0).sqrt() * k;
    Ok(h + (&field * &sx).scale_real(coupling))
}

/// The two parts `(H_JT, H_NL)` of the effective-mode Hamiltonian.
///
/// `H_JT = (ω/2)σ_z + ω′n₂ + J(α†₁α₂+α†₂α₁) + ω_eff[n₁ + k_eff x₁σ_z]
///        + c₂[(α†₁α₂+α₁α†₂) + k_eff x₂σ_z]`
///
/// `H_NL = [ω_eff x₁² + ω′ x₂² + J x₁x₂]σ_x`
///
/// The linear terms couple through σ_z and the quadratic ones through σ_x.
pub fn build_effective_parts<T: Real>(
    space: &SpaceSpec,
    p: &ModelParams<T>,
    normalization: EffectiveNormalization,
) -> Result<(QOperator<T>, QOperator<T>)> {
    space.require_two_modes_one_qubit()?;
    let e = derive_effective(p, normalization)?;
    let a1 = annihilation::<T>(space, 0)?;
    let a2 = annihilation::<T>(space, 1)?;
    let x1 = &a1 + &a1.adjoint();
    let x2 = &a2 + &a2.adjoint();
    let sx = pauli::<T>(space, PauliAxis::X, 0)?;
    let sz = pauli::<T>(space, PauliAxis::Z, 0)?;
    let hop = &(&a1.adjoint() * &a2) + &(&a2.adjoint() * &a1);

    let mut h_jt = sz.scale_real(p.omega_q / T::lit(2.0));
    h_jt = h_jt + number::<T>(space, 1)?.scale_real(e.omega_prime);
    h_jt = h_jt + hop.scale_real(p.j_hop);
    h_jt = h_jt + (&number::<T>(space, 0)? + &(&x1 * &sz).scale_real(e.k_eff)).scale_real(e.omega_eff);
    h_jt = h_jt + (&hop + &(&x2 * &sz).scale_real(e.k_eff)).scale_real(e.c2);

    let quad = (&x1 * &x1).scale_real(e.omega_eff)
        + (&x2 * &x2).scale_real(e.omega_prime)
        + (&x1 * &x2).scale_real(p.j_hop);
    let h_nl = &quad * &sx;
    Ok((h_jt, h_nl))
}

/// `H = H_JT + H_NL`; see [`build_effective_parts`].
pub fn build_effective_hamiltonian<T: Real>(
    space: &SpaceSpec,
    p: &ModelParams<T>,
    normalization: EffectiveNormalization,
) -> Result<QOperator<T>> {
    let (h_jt, h_nl) = build_effective_parts(space, p, normalization)?;
    Ok(h_jt + h_nl)
}

use serde::{Deserialize, Serialize};

use super::CorrelationSeries;
use crate::dynamics::{propagate_functionals, EvolveOptions, Liouvillian, Stepper};
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, hermitian_eigenvalues, qubit_lowering, DensityMatrix, QOperator};
use crate::scalar::Real;

/// Field whose intensity correlations are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceTarget {
    /// Resonator 1, `O = a₁`.
    Resonator,
    /// The qubit, `O = σ⁻`.
    Qubit,
}

/// Denominator of `g²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum G2Normalization {
    /// `⟨O†O⟩(t*) · ⟨O†O⟩(t*+τ)`
    #[default]
    Standard,
    /// `⟨O†O⟩(t*)` only.
    AsPrinted,
}

/// How the anchor time `t*` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceTime<T> {
    /// First `t = n·step` with `‖ρ(t+step) − ρ(t)‖₁ < threshold`, searched up
    /// to `cap` (default `50/κ_min`).
    Settled { step: T, threshold: T, cap: Option<T> },
    Fixed(T),
}

impl<T: Real> Default for ReferenceTime<T> {
    fn default() -> Self {
        ReferenceTime::Settled {
            step: T::lit(10.0),
            threshold: T::lit(1e-6),
            cap: None,
        }
    }
}

/// State at the anchor time.
#[derive(Clone, Debug)]
pub struct ReferenceState<T: Real> {
    pub time: T,
    pub state: DensityMatrix<T>,
    /// False when the search hit its cap before the threshold was met.
    pub settled: bool,
}

fn trace_norm<T: Real>(m: &nalgebra::DMatrix<crate::scalar::C<T>>) -> T {
    hermitian_eigenvalues(m).into_iter().fold(T::zero(), |acc, x| acc + x.abs())
}

/// Evolves `rho0` to the anchor time.
pub fn settle<T: Real>(
    l: &Liouvillian<T>,
    rho0: &DensityMatrix<T>,
    reference: &ReferenceTime<T>,
    opts: &EvolveOptions<T>,
) -> Result<ReferenceState<T>> {
    if rho0.space() != l.space() {
        return Err(Error::Argument("initial state lives on a different space".into()));
    }
    rho0.validate()?;
    let space = l.space().clone();
    match *reference {
        ReferenceTime::Fixed(t) => {
            if !(t.is_finite() && t >= T::zero()) {
                return Err(Error::Argument("reference time must be finite and >= 0".into()));
            }
            let state = if t > T::zero() {
                crate::dynamics::evolve(l, rho0, &[t], opts)?.states.remove(0)
            } else {
                rho0.clone()
            };
            Ok(ReferenceState {
                time: t,
                state,
                settled: true,
            })
        }
        ReferenceTime::Settled { step, threshold, cap } => {
            if !(step.is_finite() && step > T::zero() && threshold > T::zero()) {
                return Err(Error::Argument("settle step and threshold must be positive".into()));
            }
            let cap = match cap {
                Some(c) => c,
                None => l.min_rate().map_or(T::zero(), |r| T::lit(50.0) / r),
            };
            let mut stepper = Stepper::new(l, step, opts)?;
            let mut rho = rho0.matrix().clone();
            let mut t = T::zero();
            let mut settled = false;
            while t + step <= cap {
                let next = stepper.step(&rho)?;
                let change = trace_norm(&(&next - &rho));
                if change < threshold {
                    settled = true;
                    break;
                }
                rho = next;
                t += step;
            }
            Ok(ReferenceState {
                time: t,
                state: DensityMatrix::new_unchecked(space, rho)?,
                settled,
            })
        }
    }
}

fn target_operator<T: Real>(l: &Liouvillian<T>, target: CoherenceTarget) -> Result<QOperator<T>> {
    match target {
        CoherenceTarget::Resonator => annihilation(l.space(), 0),
        CoherenceTarget::Qubit => qubit_lowering(l.space(), 0),
    }
}

/// `g²(τ)` anchored at a given state: numerator
/// `tr[O†O e^{Lτ}(O ρ* O†)]`.
pub fn g2_at<T: Real>(
    l: &Liouvillian<T>,
    reference: &ReferenceState<T>,
    target: CoherenceTarget,
    taus: &[T],
    normalization: G2Normalization,
    opts: &EvolveOptions<T>,
) -> Result<CorrelationSeries<T, T>> {
    Ok(g2_targets(l, reference, &[target], taus, normalization, opts)?.remove(0))
}

/// [`g2_at`] for several targets sharing one propagation.
pub fn g2_targets<T: Real>(
    l: &Liouvillian<T>,
    reference: &ReferenceState<T>,
    targets: &[CoherenceTarget],
    taus: &[T],
    normalization: G2Normalization,
    opts: &EvolveOptions<T>,
) -> Result<Vec<CorrelationSeries<T, T>>> {
    if taus.first().is_none_or(|t| !t.is_zero()) {
        return Err(Error::Argument("delay grid must start at 0".into()));
    }
    let rho = reference.state.matrix();
    let mut inputs = vec![rho.clone()];
    let mut numbers = Vec::with_capacity(targets.len());
    for &target in targets {
        let o = target_operator(l, target)?;
        let od = o.adjoint();
        inputs.push(o.matrix() * rho * od.matrix());
        numbers.push(&od * &o);
    }
    let observables: Vec<_> = numbers.iter().map(|n| n.matrix()).collect();
    let out = propagate_functionals(l, &inputs, &observables, taus, opts)?;
    let floor = T::lit(1e-12);
    targets
        .iter()
        .enumerate()
        .map(|(q, _)| {
            let numerator = &out[q + 1][q];
            let n_later = &out[0][q];
            let n0 = n_later[0].re;
            let values = taus
                .iter()
                .enumerate()
                .map(|(j, &tau)| {
                    let denominator = match normalization {
                        G2Normalization::Standard => n0 * n_later[j].re,
                        G2Normalization::AsPrinted => n0,
                    };
                    if denominator.abs() < floor {
                        return Err(Error::UndefinedCoherence {
                            tau: tau.to_f64_lossy(),
                            denominator: denominator.to_f64_lossy(),
                        });
                    }
                    Ok(numerator[j].re / denominator)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CorrelationSeries {
                taus: taus.to_vec(),
                values,
                reference_time: Some(reference.time),
            })
        })
        .collect()
}

/// Second-order coherence of `target` after evolving `rho0` to the anchor
/// time chosen by `reference`.
#[allow(clippy::too_many_arguments)]
pub fn g2<T: Real>(
    l: &Liouvillian<T>,
    rho0: &DensityMatrix<T>,
    target: CoherenceTarget,
    taus: &[T],
    normalization: G2Normalization,
    reference: &ReferenceTime<T>,
    opts: &EvolveOptions<T>,
) -> Result<CorrelationSeries<T, T>> {
    let anchor = settle(l, rho0, reference, opts)?;
    g2_at(l, &anchor, target, taus, normalization, opts)
}

use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use super::CorrelationSeries;
use crate::dynamics::{correlation, EvolveOptions, Liouvillian};
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, DensityMatrix};
use crate::scalar::{cabs, Real, C};

/// Which resonator field is correlated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMode {
    /// Mode 1, the resonator the qubit couples to most strongly.
    #[default]
    Privileged,
    /// Mode 2.
    Disadvantaged,
}

impl FieldMode {
    pub fn index(self) -> usize {
        match self {
            FieldMode::Privileged => 0,
            FieldMode::Disadvantaged => 1,
        }
    }
}

/// Operator ordering inside the field correlation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationOrdering {
    /// `⟨a†(τ) a(0)⟩`
    #[default]
    Emission,
    /// `⟨a(τ) a(0)⟩`
    AsPrinted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta<T> {
    pub mode: FieldMode,
    pub ordering: CorrelationOrdering,
    pub tau_max: T,
    pub n_samples: usize,
    pub d_tau: T,
    /// Frequency bin width `2π/tau_max`.
    pub resolution: T,
    pub c0: C<T>,
    /// `|C(τ_last)| / |C(0)|`.
    pub tail_ratio: T,
    /// `∫P dω / (2π Re C(0))` over the emitted grid.
    pub wk_ratio: T,
    pub warnings: Vec<String>,
}

impl<T: Real> SpectrumMeta<T> {
    /// Whether the correlation decayed within the delay window.
    pub fn decayed(&self) -> bool {
        self.tail_ratio <= T::lit(1e-6)
    }
}

/// Power density on an ascending uniform frequency grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries<T> {
    pub omegas: Vec<T>,
    pub values: Vec<T>,
    pub meta: SpectrumMeta<T>,
}

impl<T: Real> SpectrumSeries<T> {
    /// Trapezoid integral of the power over the grid.
    pub fn integral(&self) -> T {
        trapezoid(&self.omegas, &self.values)
    }
}

fn trapezoid<T: Real>(x: &[T], y: &[T]) -> T {
    x.windows(2)
        .zip(y.windows(2))
        .fold(T::zero(), |acc, (xs, ys)| acc + (xs[1] - xs[0]) * (ys[0] + ys[1]) * T::lit(0.5))
}

/// `P(ω) = 2 Re ∫₀^∞ C(τ) e^{−iωτ} dτ` by FFT of the regression-rule
/// correlation on `τ_j = j·tau_max/n_samples`.
///
/// No window is applied. If `|C|` has not decayed below `1e-6·|C(0)|` at the
/// last sample a warning is attached to the metadata.
pub fn power_spectrum<T: Real + FftNum>(
    l: &Liouvillian<T>,
    rho_ss: &DensityMatrix<T>,
    mode: FieldMode,
    tau_max: T,
    n_samples: usize,
    ordering: CorrelationOrdering,
    opts: &EvolveOptions<T>,
) -> Result<SpectrumSeries<T>> {
    if n_samples < 2 || !n_samples.is_power_of_two() {
        return Err(Error::Argument(format!("n_samples must be a power of two >= 2, got {n_samples}")));
    }
    if !(tau_max.is_finite() && tau_max > T::zero()) {
        return Err(Error::Argument("tau_max must be positive and finite".into()));
    }
    rho_ss.validate()?;
    let a = annihilation(l.space(), mode.index())?;
    let left = match ordering {
        CorrelationOrdering::Emission => a.adjoint(),
        CorrelationOrdering::AsPrinted => a.clone(),
    };
    let d_tau = tau_max / T::lit(n_samples as f64);
    let taus: Vec<T> = (0..n_samples).map(|j| d_tau * T::lit(j as f64)).collect();
    let corr = correlation(l, rho_ss, &left, &a, &taus, opts)?;
    Ok(spectrum_from_correlation(&corr, mode, ordering, tau_max, l.min_rate()))
}

pub(crate) fn spectrum_from_correlation<T: Real + FftNum>(
    corr: &CorrelationSeries<T, C<T>>,
    mode: FieldMode,
    ordering: CorrelationOrdering,
    tau_max: T,
    min_rate: Option<T>,
) -> SpectrumSeries<T> {
    let n = corr.values.len();
    let d_tau = tau_max / T::lit(n as f64);
    let mut buf: Vec<Complex<T>> = corr.values.clone();
    buf[0] *= T::lit(0.5);
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = (n / 2) as i64;
    let resolution = T::two_pi() / tau_max;
    let (omegas, values): (Vec<T>, Vec<T>) = (-half..half)
        .map(|m| {
            let idx = m.rem_euclid(n as i64) as usize;
            (resolution * T::lit(m as f64), T::lit(2.0) * d_tau * buf[idx].re)
        })
        .unzip();

    let c0 = corr.values[0];
    let c0_abs = cabs(c0);
    let tail_ratio = if c0_abs > T::zero() {
        cabs(corr.values[n - 1]) / c0_abs
    } else {
        T::zero()
    };
    let mut warnings = Vec::new();
    if tail_ratio > T::lit(1e-6) {
        warnings.push(format!(
            "correlation not decayed at tau_max: |C(last)|/|C(0)| = {:.3e}",
            tail_ratio.to_f64_lossy()
        ));
    }
    if let Some(rate) = min_rate {
        if tau_max * rate < T::one() {
            warnings.push(format!(
                "tau_max * slowest rate = {:.3e} < 1",
                (tau_max * rate).to_f64_lossy()
            ));
        }
    }
    let integral = trapezoid(&omegas, &values);
    let wk_ratio = if c0.re != T::zero() {
        integral / (T::two_pi() * c0.re)
    } else {
        T::zero()
    };
    SpectrumSeries {
        omegas,
        values,
        meta: SpectrumMeta {
            mode,
            ordering,
            tau_max,
            n_samples: n,
            d_tau,
            resolution,
            c0,
            tail_ratio,
            wk_ratio,
            warnings,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentzian_corr(n: usize, tau_max: f64, omega: f64, gamma: f64) -> CorrelationSeries<f64> {
        let dt = tau_max / n as f64;
        let taus: Vec<f64> = (0..n).map(|j| j as f64 * dt).collect();
        let values = taus
            .iter()
            .map(|&t| Complex::new(0.0, omega * t).exp() * (-gamma * t).exp())
            .collect();
        CorrelationSeries {
            taus,
            values,
            reference_time: None,
        }
    }

    #[test]
    fn single_exponential_gives_lorentzian_peak() {
        let (omega, gamma) = (1.0, 0.05);
        let corr = lorentzian_corr(4096, 400.0, omega, gamma);
        let s = spectrum_from_correlation(&corr, FieldMode::Privileged, CorrelationOrdering::Emission, 400.0, None);
        assert!(s.omegas.windows(2).all(|w| w[1] > w[0]));
        let (imax, _) = s
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((s.omegas[imax] - omega).abs() <= s.meta.resolution);
        // peak height of 2γ/(γ² + 0) = 2/γ
        assert!((s.values[imax] - 2.0 / gamma).abs() / (2.0 / gamma) < 0.02);
        assert!(s.meta.decayed());
        assert!((s.meta.wk_ratio - 1.0).abs() < 0.02);
    }

    #[test]
    fn undecayed_correlation_warns() {
        let corr = lorentzian_corr(256, 10.0, 1.0, 0.01);
        let s = spectrum_from_correlation(&corr, FieldMode::Privileged, CorrelationOrdering::Emission, 10.0, Some(0.01));
        assert_eq!(s.meta.warnings.len(), 2);
        assert!(!s.meta.decayed());
    }
}

//! Observables: eigenvalue scans, emission spectra, second-order coherence
//! and photon population imbalance.

mod coherence;
mod eigen;
mod imbalance;
mod peaks;
mod spectrum;

use serde::{Deserialize, Serialize};

use crate::scalar::{Real, C};

pub use coherence::{g2, g2_at, g2_targets, settle, CoherenceTarget, G2Normalization, ReferenceState, ReferenceTime};
pub use eigen::{eigen_scan, eigen_scan_with, EigenTable, ScanOptions};
pub use imbalance::{imbalance, ImbalanceSeries, ImbalanceSummary};
pub use peaks::{find_peaks, Peak};
pub use spectrum::{power_spectrum, CorrelationOrdering, FieldMode, SpectrumMeta, SpectrumSeries};

/// Values sampled on a delay grid starting at zero.
///
/// `V` is complex for field correlations and real for `g²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries<T, V = C<T>> {
    pub taus: Vec<T>,
    pub values: Vec<V>,
    /// Time `t*` at which the two-time function was anchored, when not
    /// stationary.
    pub reference_time: Option<T>,
}

impl<T: Real, V> CorrelationSeries<T, V> {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

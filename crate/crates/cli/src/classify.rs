//! Structural labels for imbalance traces.

use jtcqed::ImbalanceSummary;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrappingThresholds {
    /// Share of the defined samples in each of the early and late windows.
    pub window_fraction: f64,
    pub min_sign_changes: usize,
    /// Late `max|z|` must fall below this multiple of early `max|z|`.
    pub decay_ratio: f64,
    pub localized_low: f64,
    pub localized_high: f64,
    pub trapped_min: f64,
}

impl Default for TrappingThresholds {
    fn default() -> Self {
        Self {
            window_fraction: 0.25,
            min_sign_changes: 2,
            decay_ratio: 0.5,
            localized_low: 0.1,
            localized_high: 0.9,
            trapped_min: 0.9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trapping {
    /// `z` keeps changing sign and its envelope shrinks.
    OscillatoryDecaying,
    /// Late `z` is bounded away from both 0 and 1 without oscillating.
    PartiallyLocalized,
    /// Late `z` stays near 1.
    SelfTrapped,
    Unclassified,
}

pub fn classify(s: &ImbalanceSummary<f64>, th: &TrappingThresholds) -> Trapping {
    if s.late_min >= th.trapped_min {
        Trapping::SelfTrapped
    } else if s.sign_changes >= th.min_sign_changes && s.late_max_abs <= th.decay_ratio * s.early_max_abs {
        Trapping::OscillatoryDecaying
    } else if s.late_sign_changes == 0 && s.late_min >= th.localized_low && s.late_max <= th.localized_high {
        Trapping::PartiallyLocalized
    } else {
        Trapping::Unclassified
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(sign_changes: usize, early: f64, late: (f64, f64), late_changes: usize) -> ImbalanceSummary<f64> {
        ImbalanceSummary {
            sign_changes,
            early_max_abs: early,
            late_min: late.0,
            late_max: late.1,
            late_max_abs: late.0.abs().max(late.1.abs()),
            late_sign_changes: late_changes,
        }
    }

    #[test]
    fn labels() {
        let th = TrappingThresholds::default();
        assert_eq!(classify(&summary(0, 1.0, (0.92, 0.99), 0), &th), Trapping::SelfTrapped);
        assert_eq!(classify(&summary(9, 1.0, (-0.3, 0.3), 4), &th), Trapping::OscillatoryDecaying);
        assert_eq!(classify(&summary(0, 1.0, (0.7, 0.8), 0), &th), Trapping::PartiallyLocalized);
        assert_eq!(classify(&summary(9, 1.0, (-0.9, 0.9), 4), &th), Trapping::Unclassified);
    }
}

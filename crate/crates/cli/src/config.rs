//! Run configuration, read from TOML.

use std::path::PathBuf;

use jtcqed::{
    CorrelationOrdering, DissipationParams, FieldMode, G2Normalization, Method, QubitLevel, ReferenceTime, SpaceSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Eigenscan,
    Spectrum,
    G2,
    Imbalance,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Eigenscan => "eigenscan",
            Task::Spectrum => "spectrum",
            Task::G2 => "g2",
            Task::Imbalance => "imbalance",
        }
    }
}

/// Either an explicit list or `points` evenly spaced values from `start` to
/// `stop` inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::List(ref v) => v.clone(),
            Grid::Range { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![start],
                n => (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            stop
                        } else {
                            start + (stop - start) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect(),
            },
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_fock() -> [usize; 2] {
    [5, 5]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Grid>,
    /// Fixed hopping; absent means `J = Δ/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_grid: Option<Grid>,
    #[serde(default = "default_true")]
    pub include_quadratic: bool,
    #[serde(default = "default_fock")]
    pub fock_dims: [usize; 2],
    #[serde(default)]
    pub obrien_normalization: bool,
}

impl ModelConfig {
    pub fn new(k: f64) -> Self {
        Self {
            k,
            delta: None,
            delta_grid: None,
            j_override: None,
            j_grid: None,
            include_quadratic: true,
            fock_dims: default_fock(),
            obrien_normalization: false,
        }
    }

    pub fn deltas(&self) -> Vec<f64> {
        match (&self.delta, &self.delta_grid) {
            (_, Some(g)) => g.values(),
            (Some(d), None) => vec![*d],
            (None, None) => Vec::new(),
        }
    }

    /// Hopping values; `None` stands for `J = Δ/2`.
    pub fn hoppings(&self) -> Vec<Option<f64>> {
        match (&self.j_override, &self.j_grid) {
            (_, Some(g)) => g.values().into_iter().map(Some).collect(),
            (j, None) => vec![*j],
        }
    }

    pub fn space(&self) -> jtcqed::Result<SpaceSpec> {
        SpaceSpec::two_modes_one_qubit(self.fock_dims[0], self.fock_dims[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub n1: usize,
    pub n2: usize,
    pub qubit: QubitLevel,
}

impl Default for InitialState {
    fn default() -> Self {
        Self {
            n1: 1,
            n2: 0,
            qubit: QubitLevel::Excited,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub tau_max: f64,
    pub n_samples: usize,
    /// Evolution times for `imbalance`, delays for `g2`.
    pub times: Grid,
    pub tolerances: Tolerances,
    pub correlation_ordering: CorrelationOrdering,
    pub g2_normalization: G2Normalization,
    pub initial_state: InitialState,
    pub method: Method,
    pub g2_reference: ReferenceTime<f64>,
    pub eigen_count: usize,
    pub field_mode: FieldMode,
    /// Relative prominence for the peak tables in spectrum manifests.
    pub peak_prominence: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            tau_max: 1e4,
            n_samples: 16384,
            times: Grid::Range {
                start: 0.0,
                stop: 600.0,
                points: 1201,
            },
            tolerances: Tolerances::default(),
            correlation_ordering: CorrelationOrdering::default(),
            g2_normalization: G2Normalization::default(),
            initial_state: InitialState::default(),
            method: Method::default(),
            g2_reference: ReferenceTime::default(),
            eigen_count: 5,
            field_mode: FieldMode::default(),
            peak_prominence: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    /// Significant digits of every number written to CSV.
    pub precision: usize,
    /// File stem; defaults to the task name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::from("out"),
            precision: 12,
            name: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub model: ModelConfig,
    #[serde(default)]
    pub dissipation: DissipationParams<f64>,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_grid(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(usage(format!("{name} is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(usage(format!("{name} has non-finite entries")));
    }
    Ok(())
}

impl RunConfig {
    pub fn new(task: Task, model: ModelConfig) -> Self {
        Self {
            task,
            model,
            dissipation: DissipationParams::default(),
            numerics: NumericsConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| usage(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn stem(&self) -> String {
        self.output.name.clone().unwrap_or_else(|| self.task.name().to_string())
    }

    /// Checks everything that can be checked without running the model.
    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.model;
        let n = &self.numerics;
        if !(m.k.is_finite() && m.k >= 0.0) {
            return Err(usage("model.k must be finite and >= 0"));
        }
        if m.delta.is_some() && m.delta_grid.is_some() {
            return Err(usage("model.delta and model.delta_grid are mutually exclusive"));
        }
        if m.delta.is_none() && m.delta_grid.is_none() {
            return Err(usage("one of model.delta or model.delta_grid is required"));
        }
        if m.j_override.is_some() && m.j_grid.is_some() {
            return Err(usage("model.j_override and model.j_grid are mutually exclusive"));
        }
        check_grid("model.delta_grid", &m.deltas())?;
        if m.j_grid.is_some() {
            let js: Vec<f64> = m.hoppings().into_iter().flatten().collect();
            check_grid("model.j_grid", &js)?;
        }
        if m.j_override.is_some_and(|j| !j.is_finite()) {
            return Err(usage("model.j_override must be finite"));
        }
        if m.fock_dims.contains(&0) {
            return Err(usage("model.fock_dims entries must be >= 1"));
        }
        self.dissipation.validate().map_err(|e| usage(format!("dissipation: {e}")))?;
        let rt = n.tolerances;
        if !(rt.rtol > 0.0 && rt.atol > 0.0 && rt.rtol.is_finite() && rt.atol.is_finite()) {
            return Err(usage("numerics.tolerances must be positive"));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(usage("output.precision must be in 1..=17"));
        }
        if self.output.path.as_os_str().is_empty() {
            return Err(usage("output.path is empty"));
        }
        if let Some(name) = &self.output.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(usage("output.name must be a plain file stem"));
            }
        }
        let dim = 2 * m.fock_dims[0] * m.fock_dims[1];
        match self.task {
            Task::Eigenscan => {
                if n.eigen_count == 0 || n.eigen_count > dim {
                    return Err(usage(format!("numerics.eigen_count must be in 1..={dim}")));
                }
            }
            Task::Spectrum => {
                if !(n.tau_max.is_finite() && n.tau_max > 0.0) {
                    return Err(usage("numerics.tau_max must be positive"));
                }
                if n.n_samples < 2 || !n.n_samples.is_power_of_two() {
                    return Err(usage("numerics.n_samples must be a power of two >= 2"));
                }
                if !(0.0..=1.0).contains(&n.peak_prominence) {
                    return Err(usage("numerics.peak_prominence must be in [0, 1]"));
                }
            }
            Task::G2 | Task::Imbalance => {
                let times = n.times.values();
                check_grid("numerics.times", &times)?;
                if times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
                    return Err(usage("numerics.times must be nonnegative and strictly increasing"));
                }
                if self.task == Task::G2 && times[0] != 0.0 {
                    return Err(usage("numerics.times must start at 0 for g2"));
                }
                let s = n.initial_state;
                if s.n1 >= m.fock_dims[0] || s.n2 >= m.fock_dims[1] {
                    return Err(usage("numerics.initial_state exceeds model.fock_dims"));
                }
                if let ReferenceTime::Settled { step, threshold, cap } = n.g2_reference {
                    if !(step > 0.0 && threshold > 0.0 && cap.is_none_or(|c| c >= 0.0)) {
                        return Err(usage("numerics.g2_reference needs positive step and threshold"));
                    }
                }
            }
        }
        Ok(())
    }
}

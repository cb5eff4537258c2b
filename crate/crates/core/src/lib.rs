//! Simulator for a flux qubit coupled to two detuned resonators through a
//! Jahn-Teller type interaction.
//!
//! The crate is organised bottom-up:
//!
//! * [`hilbert`]: tensor-product spaces, operators and density matrices;
//! * [`model`]: raw, effective and dimensionless Hamiltonians;
//! * [`dynamics`]: Lindblad master equation, steady states, correlations;
//! * [`analysis`]: eigenvalue scans, emission spectra, `g²(τ)` and the photon
//!   population imbalance.
//!
//! Everything numerical is generic over a [`Real`] scalar (`f64` or `f32`).
//! The aliases below fix the working precision.
//!
//! ```
//! use jtcqed::{build_dimensionless_hamiltonian, SpaceSpec};
//!
//! let space = SpaceSpec::two_modes_one_qubit(2, 2).unwrap();
//! let h = build_dimensionless_hamiltonian::<f64>(&space, 0.0, 0.0, true, None).unwrap();
//! let levels = h.eigen_lowest(3).unwrap();
//! assert!((levels[0] + 0.5).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod model;
mod scalar;

pub use analysis::{
    eigen_scan, eigen_scan_with, find_peaks, g2, g2_at, g2_targets, imbalance, power_spectrum, settle, CoherenceTarget,
    CorrelationOrdering, CorrelationSeries, EigenTable, FieldMode, G2Normalization, ImbalanceSeries, ImbalanceSummary, Peak,
    ReferenceState, ReferenceTime, ScanOptions, SpectrumMeta, SpectrumSeries,
};
pub use dynamics::{
    build_liouvillian, correlation, evolve, evolve_expect, steady_state, thermal_channels, Channel, DissipationParams,
    EvolveOptions, ExpectationSeries, Liouvillian, Method, Trajectory,
};
pub use error::{Error, Result};
pub use hilbert::{
    annihilation, creation, eigen_lowest, number, pauli, quadrature, qubit_lowering, DensityMatrix, PauliAxis, QOperator,
    QubitLevel, SpaceSpec,
};
pub use model::{
    build_dimensionless_hamiltonian, build_effective_hamiltonian, build_effective_parts, build_raw_hamiltonian,
    derive_effective, EffectiveNormalization, EffectiveParams, ModelParams,
};
pub use scalar::{Real, C};

/// Library version, echoed in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Operator = QOperator<f64>;
pub type Operator32 = QOperator<f32>;
pub type Density = DensityMatrix<f64>;
pub type Density32 = DensityMatrix<f32>;
pub type Lindbladian = Liouvillian<f64>;
pub type Lindbladian32 = Liouvillian<f32>;
pub type Params = ModelParams<f64>;
pub type Rates = DissipationParams<f64>;
pub type Spectrum = SpectrumSeries<f64>;
pub type Coherence = CorrelationSeries<f64, f64>;
pub type Imbalance = ImbalanceSeries<f64>;
pub type Complex64 = C<f64>;

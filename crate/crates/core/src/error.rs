use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is out of range or inconsistent with the Hilbert space.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An input failed a structural check (Hermiticity, trace, positivity).
    #[error("validation failed: {0}")]
    Validation(String),

    /// The effective-mode transformation is undefined when both JT factors vanish.
    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    /// The Liouvillian kernel is more than one-dimensional.
    #[error("steady state is not unique: {0}")]
    DegenerateSteadyState(String),

    /// The adaptive integrator could not make progress.
    #[error("step size collapsed at t = {t:.6e} (h = {h:.3e}); the problem is stiff, use the exponential propagator")]
    Stiffness { t: f64, h: f64 },

    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The coherence denominator vanished.
    #[error("second-order coherence undefined at tau = {tau:.6e}: denominator {denominator:.3e} below 1e-12")]
    UndefinedCoherence { tau: f64, denominator: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

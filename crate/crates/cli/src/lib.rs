//! Command-line front end for the `jtcqed` simulator: TOML run configs,
//! bundled figure presets, CSV output and run manifests.

pub mod classify;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;

pub use classify::{classify, Trapping, TrappingThresholds};
pub use config::{Grid, ModelConfig, RunConfig, Task};
pub use error::CliError;
pub use run::{compute, run_config, run_path, RunReport};

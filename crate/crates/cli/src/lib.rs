//! Experiment orchestration for the hybrid-circuit simulator: JSON specs,
//! CSV/JSON persistence and the subcommand implementations behind `mipt`.

pub mod commands;
pub mod error;
pub mod io;
pub mod spec;

pub use error::{CliError, CliResult};
pub use spec::{ExperimentSpec, GateSpec, TimeSteps};

//! Host-side driver for `ssm-core`: configuration documents, the parallel
//! sweep and CSV output. The `simulate` binary wires them together.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{default_document, parse_config, render_config, ConfigError, SweepSpec};
pub use output::{write_outputs, OutputError};
pub use sweep::{run_sweep, run_sweep_with_threads, SweepError, SweepOutcome};

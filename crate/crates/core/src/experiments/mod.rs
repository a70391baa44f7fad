//! Sweep harness and command implementations behind the `wave-recover` CLI.

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;
pub mod sweep;

pub use commands::{cmd_diagnose, cmd_reconstruct, cmd_sweep};
pub use config::RunConfig;
pub use sweep::{Spacing, SweepChannel, SweepRecord};

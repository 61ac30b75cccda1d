//! Host-side tooling for the `risv2x-core` simulator: config and trajectory
//! files, the line protocol that external agents (the trainer) speak,
//! experiment sweeps and the metrics CSV.

pub mod config;
mod error;
pub mod experiment;
pub mod metrics;
pub mod protocol;
pub mod trajectory_io;

pub use error::{HarnessError, Result};

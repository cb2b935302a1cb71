//! IO, file formats, synthetic data, and the experiment harness for the
//! conditional outlier detector in `condout-core`.
//!
//! The split keeps the numeric core free of filesystem and OS concerns: this
//! crate owns ARFF/CSV parsing, model persistence, run configuration, the
//! cross-validated injection experiments, and their CSV/text reports. The
//! `condout` binary is a thin clap wrapper over these modules.

pub mod arff;
pub mod config;
pub mod csvio;
pub mod error;
pub mod experiment;
pub mod persist;
pub mod report;
pub mod synth;

pub use error::{AppError, AppResult};

//! Experiment driver for the sphere multiobjective descent solver: config
//! parsing, multi-start batches, and CSV traces/summaries.

pub mod batch;
pub mod config;
pub mod csvio;

pub use batch::{run_batch, BatchError, BatchSummary};
pub use config::{ConfigError, ExperimentConfig, FileConfig, Overrides};

//! Experiment configuration, Monte-Carlo orchestration, the bit-allocation
//! sweep and CSV output.

pub mod config;
pub mod io;
pub mod monte_carlo;
pub mod sweep;

pub use config::{load_config, load_config_with, ExperimentConfig, InitialValues};
pub use monte_carlo::{log_grid, monte_carlo, MonteCarloOptions, MonteCarloResult, SeriesPoint, TrialSeries};
pub use sweep::{sweep_bits, SweepResult, SweepRow};

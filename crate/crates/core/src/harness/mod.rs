//! Experiment orchestration: configuration files, initial-data synthesis,
//! single runs, ε-sweeps, rate fits and the dispersive-decay study.

pub mod config;
pub mod data;
pub mod run;
pub mod sweep;

pub use config::{ConfigError, ExperimentConfig, SnapshotPolicy};
pub use run::{metric_ball, run_single, HarnessError, RunArtifacts};
pub use sweep::{
    acoustic_decay_study, data_adjustment_experiment, fit_rate, run_sweep, DecayStudy, FitError,
    SweepRow, SweepTable,
};

//! Experiment runner: seeded parallel Monte Carlo trials, sweeps,
//! interception runs, blend calibration, latency model and CSV output.
//!
//! Every trial draws from its own ChaCha stream keyed by
//! `(seed, sweep point, trial)`, and results are collected by index, so
//! output does not depend on the number of worker threads.

mod calibrate;
mod config;
mod csv;
mod experiment;
mod latency;

pub use calibrate::{calibrate_blend, haar_mean_fidelity, ANCHOR_DEGRADATION, ANCHOR_FIDELITY};
pub use config::{
    default_sweep, BlendBeta, ExperimentConfig, NodeSpec, TopologySpec, DEFAULT_TRIALS,
};
pub use csv::{emit_csv, format_csv, write_csv, CSV_HEADER};
pub use experiment::{
    mean_and_stderr, run_adversary, run_adversary_point, run_point, run_sweep, run_trial,
    trial_rng, AdversaryOutcome, MetricsRecord, StreamDomain, TrialOutcome,
};
pub use latency::{latency_compare, LatencyComparison, LatencyParams};

//! Configuration, seeded runs, sweeps over migration medians, synthetic
//! stream replay and file output.

mod config;
pub mod output;
mod run;

pub use config::ExperimentConfig;
pub use run::{
    average_series, run_seed, run_single, run_sweep, run_sweep_serial, run_synthetic,
    run_with_context, splitmix64, McavRow, RunContext, RunResult, SignalRow, SummaryRow,
    SweepResult, SyntheticResult,
};

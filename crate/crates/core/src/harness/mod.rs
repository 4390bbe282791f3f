//! Experiment sweeps, gap tables and exhaustive verification.

mod config;
mod experiment;
mod gaps;
mod verify;

pub use config::{ExperimentConfig, InstanceFamily, OutputPaths, Problem};
pub use experiment::{run_experiment, within, write_csv, write_jsonl, ExperimentResult, ResultRow, TOLERANCE};
pub use gaps::{gap_table, GapRow};
pub use verify::{
    consistent_measure, explore, search_provable_floor, verify_exhaustive,
    verify_identify_questioner, Counterexample, HullCheck, TreeStats, VerifyLimits, VerifyReport, VerifyScope,
};

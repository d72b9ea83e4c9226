//! The simulated imaging chain: truth `A`, channel pattern `B`, measurement
//! `C` and clustering estimate `D`, swept over operating points of the two
//! ROC curves.
//!
//! Every random draw comes from a substream keyed by the master seed, the
//! sample index and the stage (see [`seed`]). Results are therefore
//! independent of the thread count, and the classical and quantum runs at
//! one type-1 error share truths, patterns and noise variates.

pub mod config;
pub mod experiment;
pub mod output;
pub mod seed;
pub mod sweep;

pub use config::{ExperimentConfig, RocSource, Scenario, ScenarioKind};
pub use experiment::{
    estimate, run_experiment, run_experiment_with, run_sample, ExperimentResult, Record,
    RecordGroup, SampleJob, SampleOutcome, Truth,
};
pub use output::format_float;
pub use seed::{seed_stream, stage_tag, SimRng, Stage, PRNG_ID};
pub use sweep::{
    errors_at, records_file_name, run_sweep, write_records_csv, write_roc_csv, Family, RocCurves,
    SweepReport, SweepRow,
};

//! Experiment orchestration: run configs with stable hashes, coupled and
//! decoupled sweeps, per-run directories with records and reports,
//! log-log slope fits, and the acceptance checks.

pub mod acceptance;
mod config;
mod error;
mod record;
mod run;
mod sweep;

pub use config::{coupled_hbar, FrameKind, LatticeSpec, Preset, RunConfig, SweepLists, TestFnSpec};
pub use error::HarnessError;
pub use record::{fit_slope, read_records, summary_csv, write_records, RecordSink, SweepRecord};
pub use run::{run_dir, run_experiment, RunReport, FAILED_MARKER};
pub use sweep::{aggregate, run_dirs, run_sweep, SlopeRow, SweepSummary};

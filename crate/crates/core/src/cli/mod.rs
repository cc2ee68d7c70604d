//! Config-driven experiment runner and report writers.

mod config;
mod output;
mod run;

pub use config::{
    Block, DistortionPlan, ExperimentConfig, MapSpec, OutputConfig, PullbackConfig, RGridSpec, ScheduleSpec, Spacing,
    Tolerances, VerifyPlan,
};
pub use output::{emit_outputs, fmt_sig, report_csv, report_json, report_svg, round_sig, Emitted, CSV_HEADER};
pub use run::{
    build, run_experiment, with_threads, Built, DistortionSummary, GrowthRow, PlotData, RadiusRow, RunReport,
    Subcommand, SuiteResult,
};

/// Worker count from QRMAX_THREADS, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("QRMAX_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&t| t > 0)
}

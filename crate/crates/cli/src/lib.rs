//! Batch experiments over `smoothlab`: each command turns an
//! [`ExperimentConfig`] into a CSV table plus an exit status.
//!
//! Exit codes: `0` when every check with valid hypotheses holds, `1` when at
//! least one genuine violation was found, `2` for usage errors.

mod commands;
mod config;
pub mod suite;

use std::fmt::Write as _;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use thiserror::Error;

pub use commands::{
    cmd_kbound_scan, cmd_lpn_bench, cmd_reduction, cmd_smooth_sweep, cmd_tradeoff,
    cmd_verify_bounds,
};
pub use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] smoothlab::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    SmoothSweep,
    VerifyBounds,
    Reduction,
    Tradeoff,
    KboundScan,
    LpnBench,
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Report, CliError> {
    match command {
        Command::SmoothSweep => cmd_smooth_sweep(cfg),
        Command::VerifyBounds => cmd_verify_bounds(cfg),
        Command::Reduction => cmd_reduction(cfg),
        Command::Tradeoff => cmd_tradeoff(cfg),
        Command::KboundScan => cmd_kbound_scan(cfg),
        Command::LpnBench => cmd_lpn_bench(cfg),
    }
}

/// A finished command: CSV text, violation count and human-readable notes.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub csv: String,
    pub rows: usize,
    pub violations: usize,
    pub notes: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 {
            1
        } else {
            0
        }
    }
}

/// One output row with the time it took to produce.
pub(crate) struct Row {
    pub cells: String,
    pub elapsed: Duration,
}

pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed())
}

pub(crate) fn render(header: &str, rows: &[Row], timestamp: bool) -> String {
    let mut csv = String::from(header);
    if timestamp {
        csv.push_str(",timestamp,wall_ms");
    }
    csv.push('\n');
    for row in rows {
        csv.push_str(&row.cells);
        if timestamp {
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            let _ = write!(csv, ",{now},{:.3}", row.elapsed.as_secs_f64() * 1e3);
        }
        csv.push('\n');
    }
    csv
}

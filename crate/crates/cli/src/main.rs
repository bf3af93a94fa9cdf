use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use smoothlab_cli::{run, CliError, Command, ExperimentConfig};

/// Exact code-smoothing experiments and the decoding-to-LPN reduction.
#[derive(Parser)]
#[command(name = "smoothlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Codeword/syndrome/message smoothing distances for the mixture law.
    SmoothSweep(Common),
    /// Batch bound certificates; exit 1 on a violation with valid hypotheses.
    VerifyBounds(Common),
    /// Run the decoding-to-LPN reduction with exact smoothing accounting.
    Reduction(Common),
    /// Worst and average bias per weight against the smoothing distance.
    Tradeoff(Common),
    /// Fit Krawtchouk bound constants.
    KboundScan(Common),
    /// Success rate of the ML LPN solver.
    LpnBench(Common),
}

/// Flags override `--set`, which overrides the config file. Most accept
/// comma-separated lists.
#[derive(Args)]
struct Common {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Samples per LPN instance.
    #[arg(long = "N", value_name = "N")]
    samples: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// key = value file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow n above the default cap of 22 (hard limit 26).
    #[arg(long)]
    max_n: Option<usize>,
    /// Append timestamp and wall-clock columns.
    #[arg(long)]
    timestamp: bool,
    /// Extra KEY=VALUE parameter, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::new(),
        };
        for pair in &self.set {
            cfg.set_pair(pair)?;
        }
        let flags = [
            ("n", &self.n),
            ("k", &self.k),
            ("w", &self.w),
            ("gamma", &self.gamma),
            ("N", &self.samples),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("eps", &self.eps),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(m) = self.max_n {
            cfg.set_max_n(m)?;
        }
        cfg.timestamp |= self.timestamp;
        Ok(cfg)
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SMOOTHLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "SMOOTHLAB_THREADS={raw:?} is not a positive integer"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    init_threads()?;
    let (command, common) = match &cli.command {
        Cmd::SmoothSweep(c) => (Command::SmoothSweep, c),
        Cmd::VerifyBounds(c) => (Command::VerifyBounds, c),
        Cmd::Reduction(c) => (Command::Reduction, c),
        Cmd::Tradeoff(c) => (Command::Tradeoff, c),
        Cmd::KboundScan(c) => (Command::KboundScan, c),
        Cmd::LpnBench(c) => (Command::LpnBench, c),
    };
    let cfg = common.config()?;
    let report = run(command, &cfg)?;
    match &common.out {
        Some(path) => std::fs::write(path, &report.csv).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(report.csv.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("smoothlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

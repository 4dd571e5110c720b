//! Batch front end: `lrq verify|spectrum|report <config>`.
//!
//! Exit status is 0 when every selected job passes, 1 when some job fails or
//! errors, and 2 when the configuration or the output directory is unusable.

pub mod config;
pub mod report;
pub mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

pub use config::{parse_config, JobSpec, RunConfig, Tolerances};
pub use run::{Command, JobContext, JobOutcome, Status};

use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "lrq", version, about = "Operator-relation checks and twisted spectra from a TOML config")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Output directory for CSV tables and report.json.
    #[arg(long, global = true, default_value = "lrq-out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for sampled points and eigensolver starts.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Refuse tolerances looser than the defaults; inconclusive verdicts fail.
    #[arg(long, global = true)]
    strict_tolerance: bool,
    /// Omit the timestamp line from outputs.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Relation checks and equivalence tests.
    Verify { config: PathBuf },
    /// Spectra and sweeps.
    Spectrum { config: PathBuf },
    /// All jobs.
    Report { config: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out: PathBuf,
    pub jobs: usize,
    pub seed: u64,
    pub strict: bool,
    pub timestamp: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { out: PathBuf::from("lrq-out"), jobs: 1, seed: DEFAULT_SEED, strict: false, timestamp: true }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outcomes: Vec<JobOutcome>,
    pub written: Vec<PathBuf>,
}

impl RunSummary {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status == Status::Pass)
    }

    pub fn exit_code(&self) -> u8 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Verify => "verify",
        Command::Spectrum => "spectrum",
        Command::Report => "report",
    }
}

/// Runs the selected jobs of a parsed config and writes the outputs.
pub fn execute(cfg: &RunConfig, command: Command, opts: &RunOptions) -> Result<RunSummary> {
    if opts.strict {
        let loose = cfg.tolerances.loosened();
        if !loose.is_empty() {
            return Err(Error::Config {
                path: "tolerances".into(),
                line: 0,
                message: format!("looser than the defaults under --strict-tolerance: {}", loose.join(", ")),
            });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParam(e.to_string()))?;
    let ctx = JobContext { seed: opts.seed, strict: opts.strict };
    let selected: Vec<&JobSpec> = cfg.jobs.iter().filter(|j| command.selects(j)).collect();
    let outcomes: Vec<JobOutcome> = pool.install(|| selected.par_iter().map(|j| run::run_job(cfg, j, &ctx)).collect());
    let written = report::write_outputs(&opts.out, &cfg.hash, command_name(command), opts.seed, &outcomes, opts.timestamp)?;
    Ok(RunSummary { outcomes, written })
}

/// Reads, parses and executes a config file.
pub fn run_file(path: &Path, command: Command, opts: &RunOptions) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let cfg = parse_config(&text).map_err(|e| match e {
        Error::Config { path: key, line, message } => Error::Config { path: format!("{}: {key}", path.display()), line, message },
        other => other,
    })?;
    execute(&cfg, command, opts)
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, config) = match cli.command {
        Sub::Verify { config } => (Command::Verify, config),
        Sub::Spectrum { config } => (Command::Spectrum, config),
        Sub::Report { config } => (Command::Report, config),
    };
    let opts = RunOptions {
        out: cli.out,
        jobs: cli.jobs,
        seed: cli.seed,
        strict: cli.strict_tolerance,
        timestamp: !cli.no_timestamp,
    };
    match run_file(&config, command, &opts) {
        Ok(summary) => {
            for o in &summary.outcomes {
                let status = match o.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Error => "ERROR",
                };
                match &o.message {
                    Some(m) => println!("{status:5} {} ({}): {m}", o.name, o.kind),
                    None => println!("{status:5} {} ({})", o.name, o.kind),
                }
            }
            println!("wrote {} files to {}", summary.written.len(), opts.out.display());
            ExitCode::from(summary.exit_code())
        }
        Err(e) => {
            eprintln!("lrq: {e}");
            ExitCode::from(2)
        }
    }
}

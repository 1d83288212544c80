//! Command-line front end: runs computations from a JSON configuration and
//! writes CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bcsphase",
    version,
    about = "Phase diagram of the BCS model with imaginary magnetic field"
)]
pub struct Cli {
    /// Worker threads for sweeps (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the gap equation at one (β, t); JSON output.
    Gap {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the phase boundary τ(β); CSV to --out (or stdout) and a JSON
    /// summary to stdout (stderr when the CSV goes to stdout).
    TauCurve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a rectangular (β, t) grid; CSV output.
    PhaseDiagram {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suites; JSON report, exit 1 on any failure.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: serde::Serialize>(value: &T, mut w: impl Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Runs one command; the error carries the exit code.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        // Fails only if a pool already exists, in which case it is reused.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match &cli.command {
        Command::Gap { config, out } => {
            let report = commands::cmd_gap(&RunConfig::load(config)?)?;
            write_json(&report, sink(out.as_deref())?)
        }
        Command::TauCurve { config, out } => {
            let curve = commands::cmd_tau_curve(&RunConfig::load(config)?)?;
            commands::write_tau_csv(&curve, sink(out.as_deref())?)?;
            let summary = commands::TauCurveSummary::of(&curve);
            match out {
                Some(_) => write_json(&summary, io::stdout().lock()),
                None => write_json(&summary, io::stderr().lock()),
            }
        }
        Command::PhaseDiagram { config, out } => {
            let rows = commands::cmd_phase_diagram(&RunConfig::load(config)?)?;
            commands::write_phase_csv(&rows, sink(out.as_deref())?)
        }
        Command::Verify {
            config,
            filter,
            out,
        } => {
            let cfg = config.as_deref().map(RunConfig::load).transpose()?;
            let report = commands::cmd_verify(cfg.as_ref(), filter.as_deref())?;
            write_json(&report, sink(out.as_deref())?)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name)
                    .collect();
                Err(CliError::Verification(failed.join(", ")))
            }
        }
    }
}

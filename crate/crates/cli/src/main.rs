//! `paulispec`: Pauli spectra, stabilizer entropies and their reference
//! curves from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 size cap exceeded, 1 anything
//! else.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::*;

#[derive(Parser, Debug)]
#[command(name = "paulispec", version, about = "Pauli spectra and stabilizer entropies of many-qubit states")]
struct Cli {
    /// Output directory (default: $PAULISPEC_OUT_DIR, then the current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the numerical kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Histogram of the exact Pauli spectrum of one state.
    Spectrum(SpectrumArgs),
    /// Exact stabilizer and filtered stabilizer entropies of one state.
    Entropy(EntropyArgs),
    /// Metropolis estimate of the filtered stabilizer entropy.
    Sample(SampleArgs),
    /// Entropies of brick-wall circuit states against the Haar values.
    Circuit(CircuitArgs),
    /// Mid-spectrum Ising eigenstates: entropies, level and ETH statistics.
    Hamiltonian(HamiltonianArgs),
    /// Entropies of subspace phase states.
    Sps(SpsArgs),
    /// Disorder-averaged entropy density against disorder strength.
    DisorderScan(DisorderScanArgs),
    /// Analytic spectrum curve in the histogram CSV layout.
    ReferenceCurve(ReferenceCurveArgs),
    /// Print the JSON schema of run configs.
    Schema,
    /// Execute a JSON run config (a manifest's `config` object also works).
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Input that failed to parse as a run config.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn load_config(path: &PathBuf) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let value = match value.get("config") {
        Some(inner) if value.get("tool").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(value).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<paulispec::Error>() {
            return match e {
                paulispec::Error::Capability(_) => 3,
                paulispec::Error::InvalidArgument(_)
                | paulispec::Error::Precondition(_)
                | paulispec::Error::Domain(_)
                | paulispec::Error::Format(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main_inner(cli: Cli) -> Result<()> {
    let task = match cli.command {
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&schema())?);
            return Ok(());
        }
        Command::Run { config } => {
            let mut cfg = load_config(&config)?;
            if cli.out.is_some() {
                cfg.out = cli.out;
            }
            if cli.threads.is_some() {
                cfg.threads = cli.threads;
            }
            return execute(cfg);
        }
        Command::Spectrum(a) => Task::Spectrum(a),
        Command::Entropy(a) => Task::Entropy(a),
        Command::Sample(a) => Task::Sample(a),
        Command::Circuit(a) => Task::Circuit(a),
        Command::Hamiltonian(a) => Task::Hamiltonian(a),
        Command::Sps(a) => Task::Sps(a),
        Command::DisorderScan(a) => Task::DisorderScan(a),
        Command::ReferenceCurve(a) => Task::ReferenceCurve(a),
    };
    execute(RunConfig { schema_version: SCHEMA_VERSION, threads: cli.threads, out: cli.out, task })
}

fn execute(cfg: RunConfig) -> Result<()> {
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(paulispec::Error::InvalidArgument("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("cannot size the thread pool")?;
    }
    let name = cfg.task.name();
    for path in run::execute(cfg)? {
        eprintln!("{name}: wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

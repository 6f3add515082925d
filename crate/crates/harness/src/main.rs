use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lrd_harness::{
    emit_report, run_conditions, run_cv_experiment, run_rate_study, run_simulate, run_table_experiment,
    ExperimentConfig, ExperimentReport, HarnessError,
};

/// Monte Carlo experiments for kernel regression with long-memory errors.
#[derive(Parser)]
#[command(name = "lrdreg", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Simulate samples and write them with error moments.
    Simulate(Common),
    /// Monte Carlo MISE and MISE* over the d ladder and bandwidths.
    Table(Common),
    /// Cross-validated bandwidths and minimized CV over the d ladder.
    Cv(Common),
    /// MISE at the optimal bandwidth over an n ladder, with slopes.
    Rates(Common),
    /// Bandwidth and negligibility condition verdicts.
    Conditions(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to LRDREG_OUT, then the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<PathBuf, HarnessError> {
    let (args, runner): (&Common, fn(&ExperimentConfig) -> Result<ExperimentReport, HarnessError>) = match &cli.verb {
        Verb::Simulate(a) => (a, run_simulate),
        Verb::Table(a) => (a, run_table_experiment),
        Verb::Cv(a) => (a, run_cv_experiment),
        Verb::Rates(a) => (a, run_rate_study),
        Verb::Conditions(a) => (a, run_conditions),
    };
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| std::env::var_os("LRDREG_OUT").map(PathBuf::from))
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| HarnessError::Config("no output directory: pass --out or set output".into()))?;
    let report = runner(&cfg)?;
    emit_report(&report, &out)?;
    for line in &report.summary {
        println!("{line}");
    }
    Ok(out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lrdreg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

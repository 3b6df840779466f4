use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dcslab::harness::{run_scenario, ExperimentConfig, HarnessError, SCENARIOS};

/// Run one experiment scenario and write metrics, timings and a manifest.
#[derive(Debug, Parser)]
#[command(name = "dcslab", version)]
struct Args {
    /// One of: train, aggregate, schedule, sensitivity, classify, example1, gradcheck.
    scenario: String,
    /// TOML config, or a manifest from an earlier run. Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), HarnessError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if args.config.is_some() && config.scenario != args.scenario {
        eprintln!("note: config names scenario `{}`, running `{}`", config.scenario, args.scenario);
    }
    config.scenario = args.scenario;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        config.out_dir = out.to_string_lossy().into_owned();
    }
    let outcome = run_scenario(&config)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    println!("wrote {}", outcome.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !SCENARIOS.contains(&args.scenario.as_str()) {
        eprintln!("error: unknown scenario `{}` (expected one of {})", args.scenario, SCENARIOS.join(", "));
        return ExitCode::from(1);
    }
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

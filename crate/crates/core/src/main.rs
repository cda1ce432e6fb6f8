use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shillset::cli;
use shillset::config::PipelineConfig;
use shillset::Error;

#[derive(Parser)]
#[command(
    name = "shillset",
    version,
    about = "Build shill-bidding datasets from auction records"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Pipeline configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed for synthesis (overrides seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, cleanse and repair raw bid records and bidder histories.
    Preprocess,
    /// Compute the nine metrics per (auction, bidder).
    Features,
    /// Drop out-of-range samples and rescale.
    Filter,
    /// Generate a synthetic auction feed with labelled shills.
    Synth,
    /// Run every stage end to end.
    Run,
    /// Print dataset statistics.
    Stats,
}

fn load(args: &Args) -> Result<PipelineConfig, Error> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| Error::MissingInput("--config is required".into()))?;
    let mut cfg = PipelineConfig::load(path)?;
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.synth.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(args: &Args) -> Result<(), Error> {
    let cfg = load(args)?;
    match args.command {
        Command::Preprocess => {
            let s = cli::cmd_preprocess(&cfg)?;
            print!("{}", s.accounting());
        }
        Command::Features => {
            let n = cli::cmd_features(&cfg)?.len();
            println!("samples={n}");
        }
        Command::Filter => {
            let (_, report) = cli::cmd_filter(&cfg)?;
            print!("{}", shillset::dataset::filter_summary(&report));
        }
        Command::Synth => {
            let out = cli::cmd_synth(&cfg)?;
            println!("records={} shills={}", out.records.len(), out.shills.len());
        }
        Command::Run => {
            let s = cli::cmd_run(&cfg)?;
            print!("{}", s.text());
        }
        Command::Stats => {
            let s = cli::cmd_stats(&cfg)?;
            print!("{s}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), e);
            ExitCode::FAILURE
        }
    }
}

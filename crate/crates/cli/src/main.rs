use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use loeve_cli::layout::Layout;
use loeve_cli::stages::{run_all, run_stage, validate, Stage};
use loeve_cli::{CliError, Overrides, PipelineConfig, Result};

#[derive(Parser)]
#[command(name = "loeve", version, about = "Dual-frequency coherence pipeline for replicated time series")]
struct Cli {
    /// Pipeline configuration (TOML); flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw replicated series from the model file.
    Simulate,
    /// Multitaper coherency per trial plus batch magnitude means.
    Estimate,
    /// Pairwise significance with false-discovery-rate control.
    Threshold,
    /// Stack thresholded trials and take the truncated SVD.
    Decompose,
    /// k-means on the leading loadings.
    Cluster,
    /// Estimator self-checks.
    Validate {
        /// Exit with status 4 when any check fails.
        #[arg(long)]
        strict: bool,
    },
    /// PNG figures (with their CSV) of every artifact present.
    Render,
    /// Every stage in order.
    Run,
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads {n}: {e}")))?;
    }
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    cfg.apply(&cli.overrides);
    let stage = match cli.command {
        Command::Simulate => Stage::Simulate,
        Command::Estimate => Stage::Estimate,
        Command::Threshold => Stage::Threshold,
        Command::Decompose => Stage::Decompose,
        Command::Cluster => Stage::Cluster,
        Command::Render => Stage::Render,
        Command::Validate { strict } => {
            cfg.validate()?;
            let report = validate(&cfg, &Layout::new(&cfg.output_dir))?;
            print!("{report}");
            println!("{}", report.summary());
            if strict && report.failures() > 0 {
                return Err(CliError::ChecksFailed(report.failures()));
            }
            return Ok(());
        }
        Command::Run => {
            for (stage, msg) in run_all(&cfg)? {
                println!("{stage}: {msg}");
            }
            return Ok(());
        }
    };
    println!("{stage}: {}", run_stage(stage, &cfg)?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

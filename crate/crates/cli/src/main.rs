use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use ehpo_cli::{commands, ExperimentConfig, Overrides, UsageError};

/// Hyperparameter deception experiments: run searches, draw conclusions,
/// defend them and certify the defense.
#[derive(Parser)]
#[command(name = "ehpo", version)]
struct Cli {
    /// Experiment config (TOML, schema ehpo-config/1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the time budget t.
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named HPO config and write its log.
    Run { name: String },
    /// Apply the naive reasoner to log files.
    Conclude {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
    },
    /// Subsampled-majority defense over K*R groups.
    Defend {
        /// JSON file of precomputed fractions {p, not_p}.
        #[arg(long)]
        fractions: Option<PathBuf>,
        /// Existing K*R-round log to defend instead of generating one.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Deception verdicts for the configured reasoners.
    Demon,
    /// Divergence, group count and proof-chain audit.
    Certify,
    /// Check a derivation file (or builtin:<name>).
    VerifyProof { path: String },
    /// Gather logs and reports into trials.csv and summary.json.
    Report { dir: Option<PathBuf> },
    /// Widen or narrow a log-scale range for one HP.
    Scout,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let Some(path) = &cli.config else {
        return Err(UsageError("this command needs --config PATH".into()).into());
    };
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(&Overrides {
        seed: cli.seed,
        budget: cli.budget,
        out: cli.out.clone(),
    })?;
    Ok(cfg)
}

fn threads() -> Result<()> {
    let Ok(v) = std::env::var("EHPO_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        UsageError(format!(
            "EHPO_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    threads()?;
    match &cli.command {
        Command::Run { name } => commands::run(&load(cli)?, name).map(drop),
        Command::Conclude { logs } => commands::conclude(&load(cli)?, logs),
        Command::Defend { fractions, log } => {
            commands::defend(&load(cli)?, fractions.as_deref(), log.as_deref()).map(drop)
        }
        Command::Demon => commands::demon(&load(cli)?).map(drop),
        Command::Certify => commands::certify(&load(cli)?).map(drop),
        Command::VerifyProof { path } => commands::verify_proof(path),
        Command::Report { dir } => {
            let dir = match (dir, &cli.config) {
                (Some(d), _) => d.clone(),
                (None, Some(_)) => load(cli)?.out_dir(),
                (None, None) => cli
                    .out
                    .clone()
                    .ok_or_else(|| UsageError("report needs a directory".into()))?,
            };
            commands::report(&dir)
        }
        Command::Scout => commands::scout(&load(cli)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

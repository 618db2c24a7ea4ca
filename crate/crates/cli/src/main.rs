//! `delaychain`: encode beats, calibrate the chain network, run it and compare classifiers.

mod commands;
mod config;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "delaychain", version, about = "Delay-chain spiking working memory for ECG beats")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of the config file, in this order.
#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores); output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Comma-separated ADM thresholds.
    #[arg(long, global = true)]
    thresholds: Option<String>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Coefficient of variation of the parameter mismatch.
    #[arg(long, global = true)]
    cv: Option<f64>,
    /// Place the rate snapshots at multiples of the calibrated memory span.
    #[arg(long, global = true)]
    auto_schedule: bool,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// The dataset CSV starts with a header line.
    #[arg(long, global = true)]
    header: bool,
    /// Any config key, as KEY=VALUE (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write one spike CSV per ADM channel for one beat.
    Encode(DataArgs),
    /// Calibrate the mismatched pool and emit the pool, f-curve and delay tables.
    Calibrate,
    /// Extract features for a dataset and emit first/last chain rasters for one beat.
    Run(DataArgs),
    /// Compare the rate-feature and raw-sample classifiers on one dataset.
    Experiment(DataArgs),
    /// Emit a synthetic labelled beat dataset.
    Synth {
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long)]
        per_class: Option<usize>,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Dataset CSV: amplitude columns followed by an integer label.
    dataset: Option<PathBuf>,
    #[arg(long)]
    classes: Option<usize>,
    /// Beat used for encoding and rasters.
    #[arg(long)]
    index: Option<usize>,
    /// Play the selected beat this many times back to back.
    #[arg(long)]
    repeat: Option<usize>,
    #[arg(long)]
    name: Option<String>,
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let mut set = |k: &str, v: String| cfg.set(k, &v);
    if let Some(v) = c.seed {
        set("seed", v.to_string())?;
    }
    if let Some(v) = c.jobs {
        set("jobs", v.to_string())?;
    }
    if let Some(v) = &c.thresholds {
        set("thresholds", v.clone())?;
    }
    if let Some(v) = c.steps {
        set("steps", v.to_string())?;
    }
    if let Some(v) = c.cv {
        set("cv", v.to_string())?;
    }
    if c.auto_schedule {
        set("auto_schedule", "true".into())?;
    }
    if let Some(v) = &c.out {
        set("out", v.display().to_string())?;
    }
    if c.header {
        set("header", "true".into())?;
    }
    match &cli.command {
        Command::Encode(d) | Command::Run(d) | Command::Experiment(d) => {
            if let Some(v) = &d.dataset {
                set("dataset", v.display().to_string())?;
            }
            if let Some(v) = d.classes {
                set("classes", v.to_string())?;
            }
            if let Some(v) = d.index {
                set("signal_index", v.to_string())?;
            }
            if let Some(v) = d.repeat {
                set("repeat", v.to_string())?;
            }
            if let Some(v) = &d.name {
                set("dataset_name", v.clone())?;
            }
        }
        Command::Synth { classes, per_class } => {
            if let Some(v) = classes {
                set("classes", v.to_string())?;
            }
            if let Some(v) = per_class {
                set("per_class", v.to_string())?;
            }
        }
        Command::Calibrate => {}
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let run = || match cli.command {
        Command::Encode(_) => commands::encode(&cfg),
        Command::Calibrate => commands::calibrate_cmd(&cfg),
        Command::Run(_) => commands::run(&cfg),
        Command::Experiment(_) => commands::experiment(&cfg),
        Command::Synth { .. } => commands::synth_cmd(&cfg),
    };
    delaychain::pipeline::with_jobs(cfg.pipeline.jobs, run)?
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

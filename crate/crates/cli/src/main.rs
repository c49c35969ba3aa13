//! `innerspeech`: batch front end for the inner-speech EEG pipeline.

mod commands;
mod config;
mod run;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{ConfigError, RunConfig};
use innerspeech_core::Error as CoreError;
use run::RunDir;

/// A command-line usage problem (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(name = "innerspeech", version, about = "Subject-specific EEG inner-speech classification")]
struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    /// Output directory (created if missing).
    #[arg(long, short)]
    out: PathBuf,

    /// `key = value` configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,

    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic trial set with known ground truth.
    Synth {
        #[command(flatten)]
        run: RunOpts,
    },
    /// Describe an EIT1, EITF or EIM1 file.
    Inspect { input: PathBuf },
    /// Flag artifacts and remove drift from flagged signals.
    Clean {
        input: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Extract the per-channel feature catalog.
    Features {
        input: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Rank features on the whole matrix and keep the top K.
    Select {
        input: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Cross-validated accuracy over a list of K values.
    Sweep {
        input: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Fit the configured pipeline on every row.
    Train {
        input: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Stratified k-fold evaluation, one feature file per subject.
    Evaluate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Apply a trained model to a feature file.
    Predict {
        model: PathBuf,
        input: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// ERP scalp maps for all trials and for each class.
    Topomap {
        input: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Tables and confusion matrices from evaluation prediction files.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Extra comparison rows as `method,accuracy,f1`.
        #[arg(long)]
        external: Option<PathBuf>,
        #[command(flatten)]
        run: RunOpts,
    },
}

fn load_config(opts: &RunOpts) -> Result<RunConfig> {
    let text = match &opts.config {
        Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    Ok(RunConfig::load(text.as_deref(), &opts.set)?)
}

fn with_run(
    opts: &RunOpts,
    name: &str,
    inputs: &[&Path],
    threads: usize,
    body: impl FnOnce(&RunConfig, &mut RunDir) -> Result<()>,
) -> Result<()> {
    let cfg = load_config(opts)?;
    let mut run = RunDir::create(&opts.out, name, &cfg, inputs)?;
    body(&cfg, &mut run)?;
    run.finish(threads)
}

fn dispatch(cli: Cli) -> Result<()> {
    let threads = cli.threads;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")?;
    match &cli.command {
        Command::Synth { run } => with_run(run, "synth", &[], threads, commands::synth),
        Command::Inspect { input } => commands::inspect(input),
        Command::Clean { input, run } => with_run(run, "clean", &[input], threads, |c, r| commands::clean(input, c, r)),
        Command::Features { input, run } => {
            with_run(run, "features", &[input], threads, |c, r| commands::features(input, c, r))
        }
        Command::Select { input, run } => with_run(run, "select", &[input], threads, |c, r| commands::select(input, c, r)),
        Command::Sweep { input, run } => with_run(run, "sweep", &[input], threads, |c, r| commands::sweep(input, c, r)),
        Command::Train { input, run } => with_run(run, "train", &[input], threads, |c, r| commands::train(input, c, r)),
        Command::Evaluate { inputs, run } => {
            let ins: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
            with_run(run, "evaluate", &ins, threads, |c, r| commands::evaluate(inputs, c, r))
        }
        Command::Predict { model, input, run } => {
            with_run(run, "predict", &[model, input], threads, |_, r| commands::predict(model, input, r))
        }
        Command::Topomap { input, run } => {
            with_run(run, "topomap", &[input], threads, |c, r| commands::topomap(input, c, r))
        }
        Command::Report { inputs, external, run } => {
            let mut ins: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
            if let Some(e) = external {
                ins.push(e);
            }
            with_run(run, "report", &ins, threads, |_, r| commands::report(inputs, external.as_deref(), r))
        }
    }
}

/// 1 usage or config, 2 data or validation, 3 numerical failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<ConfigError>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e.root() {
                CoreError::InvalidArgument(_) => 1,
                CoreError::Numerical(_) => 3,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

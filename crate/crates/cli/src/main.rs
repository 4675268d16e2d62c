//! `hinev`: event-based embedding of heterogeneous information networks.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{SweepParam, Task};
use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "hinev",
    version,
    about = "Event-based embeddings for heterogeneous networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Merge links into events and dump them.
    Events(Common),
    /// Train the autoencoder and write model and embeddings.
    Train(Common),
    /// Run an evaluation task.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        task: Task,
        /// Evaluate stored object embeddings instead of training.
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },
    /// Re-run a task for several values of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
        #[arg(long, value_enum, default_value = "classification")]
        task: Task,
        /// Metric to tabulate; defaults to the task's headline metric.
        #[arg(long)]
        metric: Option<String>,
    },
    /// Write a synthetic network with labels and expected events.
    Synth(Common),
    /// Tabulate pairwise event proximities.
    Proximity {
        #[command(flatten)]
        common: Common,
        /// Restrict pairs to objects of this type.
        #[arg(long = "type")]
        type_tag: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Tab-separated edge list.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Object types, one per line.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use a synthetic template (fig2a, fig2b, fig3a, random) as input.
    #[arg(long)]
    synth: Option<String>,
    #[arg(long)]
    synth_seed: Option<u64>,
    /// Object type that identifies events.
    #[arg(long)]
    anchor: Option<String>,
    #[arg(long)]
    dedup: bool,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    train_ratio: Option<f64>,
    #[arg(long)]
    negative_ratio: Option<f64>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    runs: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(p) = &self.preset {
            cfg.apply_preset(p)?;
        }
        if let Some(f) = &self.config {
            cfg.load_file(f, self.preset.is_none())?;
        }
        let flags: [(&str, Option<String>); 20] = [
            (
                "input",
                self.input.as_ref().map(|p| p.display().to_string()),
            ),
            (
                "schema",
                self.schema.as_ref().map(|p| p.display().to_string()),
            ),
            (
                "labels",
                self.labels.as_ref().map(|p| p.display().to_string()),
            ),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("synth", self.synth.clone()),
            ("synth_seed", self.synth_seed.map(|v| v.to_string())),
            ("anchor", self.anchor.clone()),
            ("dedup", self.dedup.then(|| "true".to_string())),
            ("dim", self.dim.map(|v| v.to_string())),
            ("beta", self.beta.map(|v| v.to_string())),
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("learning_rate", self.learning_rate.map(|v| v.to_string())),
            ("epochs", self.epochs.map(|v| v.to_string())),
            ("batch_size", self.batch_size.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("depth", self.depth.map(|v| v.to_string())),
            ("train_ratio", self.train_ratio.map(|v| v.to_string())),
            ("negative_ratio", self.negative_ratio.map(|v| v.to_string())),
            ("train_fraction", self.train_fraction.map(|v| v.to_string())),
            ("runs", self.runs.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Events(c) => commands::events(&c.resolve()?),
        Command::Train(c) => commands::train(&c.resolve()?),
        Command::Eval {
            common,
            task,
            embeddings,
        } => commands::eval(&common.resolve()?, task, embeddings.as_deref()),
        Command::Sweep {
            common,
            param,
            values,
            task,
            metric,
        } => commands::sweep(&common.resolve()?, param, &values, task, metric.as_deref()),
        Command::Synth(c) => commands::synth(&c.resolve()?),
        Command::Proximity { common, type_tag } => {
            commands::proximity(&common.resolve()?, type_tag.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

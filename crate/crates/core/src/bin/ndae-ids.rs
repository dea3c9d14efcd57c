use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ndae_ids::pipeline::{self, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(name = "ndae-ids", version, about = "Stacked NDAE + random forest intrusion detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode the raw train/test files into matrix and label files.
    Prepare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the stacked NDAEs and the classifier on prepared data.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory written by `prepare`.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a model bundle on an encoded matrix.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Defaults to `<data>/test.matrix`.
        #[arg(long, required_unless_present = "data")]
        matrix: Option<PathBuf>,
        /// Defaults to `<data>/test.labels`.
        #[arg(long, required_unless_present = "data")]
        labels: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render a machine-readable report as a table.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = PipelineConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.override_seed(seed);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Prepare { config, seed, out } => {
            let cfg = load_config(&config, seed)?;
            let data = pipeline::cmd_prepare(&cfg, &out)?;
            println!(
                "prepared {} train / {} test rows, {} columns -> {}",
                data.train.rows(),
                data.test.rows(),
                data.train.cols(),
                out.display()
            );
        }
        Command::Train { config, seed, data, out } => {
            let cfg = load_config(&config, seed)?;
            let outcome = pipeline::cmd_train(&cfg, &data, &out)?;
            for (stage, t) in &outcome.log.timings {
                println!("{stage}: {:.3}s", t.as_secs_f64());
            }
            println!("model -> {}", out.join("model").display());
        }
        Command::Eval { model, matrix, labels, data, reference, out } => {
            let data_file = |name: &str| data.as_ref().map(|d| d.join(name)).unwrap_or_default();
            let matrix = matrix.unwrap_or_else(|| data_file("test.matrix"));
            let labels = labels.unwrap_or_else(|| data_file("test.labels"));
            let report = pipeline::cmd_eval(&model, &matrix, &labels, reference.as_deref(), &out)?;
            print!("{}", report.render_table());
        }
        Command::Report { input, reference, out } => {
            let table = pipeline::cmd_report(&input, reference.as_deref())?;
            match out {
                Some(path) => std::fs::write(&path, table).map_err(|source| PipelineError::Io { path, source })?,
                None => print!("{table}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

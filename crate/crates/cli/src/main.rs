//! `dtomo`: batch front end for detector curvature tomography.
//!
//! Every subcommand reads a JSON config and writes JSON or CSV to stdout or
//! to `<out>/<command>.<ext>`. Exit status is 0 on success, 1 on a runtime
//! failure and 2 on a usage or configuration error.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Report;
use config::{ConfigDocument, ConfigError, Format};

#[derive(Debug, Parser)]
#[command(name = "dtomo", version, about = "Curvature tomography with smeared particle detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for output files; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Overrides the campaign and Monte Carlo seeds of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Coefficient engine name; overrides the config.
    #[arg(long, global = true)]
    engine: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coefficient table for every shape.
    Coeffs {
        /// Adds oracle comparison columns.
        #[arg(long)]
        validate: bool,
    },
    /// Excitation probability breakdown for every shape.
    Forward,
    /// Probe selection and design-matrix report.
    Design,
    /// Least-squares recovery from measurements or the noiseless forward model.
    Recover,
    /// Seeded finite-shot campaign followed by recovery.
    Simulate,
    /// Full Riemann tensor from recoveries in several boosted frames.
    BoostRecover {
        /// Uses finite-shot campaigns instead of exact probabilities.
        #[arg(long)]
        simulate: bool,
    },
    /// Engine, oracle and printed closed forms side by side.
    Validate {
        /// Adds the Monte Carlo oracle.
        #[arg(long)]
        monte_carlo: bool,
    },
}

fn write_report(report: &Report, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let body = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.table.headers)?;
            for row in &report.table.rows {
                w.write_record(row)?;
            }
            w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?
        }
    };
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let ext = if format == Format::Json { "json" } else { "csv" };
            let path = dir.join(format!("{}.{ext}", report.name));
            std::fs::write(&path, body)?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(&body)?,
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let path = cli.config.as_deref().ok_or_else(|| ConfigError("--config <path> is required".into()))?;
    let mut doc = ConfigDocument::load(path)?;
    if let Some(seed) = cli.seed {
        doc.oracle.seed = seed;
        if let Some(c) = doc.campaign.as_mut() {
            c.seed = seed;
        }
    }
    let engine = cli.engine.as_deref();
    let report = match cli.command {
        Command::Coeffs { validate } => commands::coeffs(&doc, engine, validate)?,
        Command::Forward => commands::forward(&doc, engine)?,
        Command::Design => commands::design(&doc, engine)?,
        Command::Recover => commands::recover(&doc, engine)?,
        Command::Simulate => commands::simulate(&doc, engine)?,
        Command::BoostRecover { simulate } => commands::boost_recover(&doc, engine, simulate)?,
        Command::Validate { monte_carlo } => commands::validate(&doc, engine, monte_carlo)?,
    };
    for note in &report.notes {
        eprintln!("{note}");
    }
    let format = cli.format.or(doc.output.format).unwrap_or(Format::Json);
    let out = cli.out.as_deref().or(doc.output.dir.as_deref());
    write_report(&report, format, out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

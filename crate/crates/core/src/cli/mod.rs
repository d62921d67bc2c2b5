//! Command-line front end: argument parsing, run configs, output files.

mod config;
mod loops;
mod output;
mod run;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;

pub use config::*;
pub use loops::parse_loop_spec;
pub use output::{Cell, Table};
pub use run::{execute, Report};

use crate::error::Error;

/// Worker threads for grid scans.
pub const THREADS_ENV: &str = "NHTOPO_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nhtopo", version, about = "Non-Hermitian coupled-mode chain toolkit")]
struct Cli {
    /// Data destination; `-` for standard output.
    #[arg(long, global = true)]
    output: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Read frequencies in MHz and multiply them by 2π.
    #[arg(long, global = true)]
    mhz2pi: bool,
    /// Run a saved JSON config instead of a subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the effective config as JSON before running.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Operation>,
}

/// Failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub kind: String,
    pub message: String,
}

impl Failure {
    fn invalid(kind: &str, message: impl Into<String>) -> Self {
        Self {
            status: EXIT_INVALID_CONFIG,
            kind: kind.into(),
            message: message.into(),
        }
    }

    /// One-line JSON record for standard error.
    pub fn record(&self) -> String {
        serde_json::json!({
            "status": self.status,
            "error": self.kind,
            "message": self.message,
        })
        .to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, status) = match &e {
            Error::InvalidParams(_) => ("InvalidParams", EXIT_INVALID_CONFIG),
            Error::DimensionMismatch { .. } => ("DimensionMismatch", EXIT_INVALID_CONFIG),
            Error::OutOfRange(_) => ("OutOfRange", EXIT_INVALID_CONFIG),
            Error::InvalidDensityMatrix(_) => ("InvalidDensityMatrix", EXIT_INVALID_CONFIG),
            Error::NotNormalized { .. } => ("NotNormalized", EXIT_INVALID_CONFIG),
            Error::NoConvergence { .. } => ("NoConvergence", EXIT_NUMERICAL),
            Error::NotAnEigenvalue { .. } => ("NotAnEigenvalue", EXIT_NUMERICAL),
            Error::RefinementDiverged { .. } => ("RefinementDiverged", EXIT_NUMERICAL),
            Error::RealnessViolation { .. } => ("RealnessViolation", EXIT_NUMERICAL),
            Error::ResultantZeroOnLoop { .. } => ("ResultantZeroOnLoop", EXIT_NUMERICAL),
            Error::SampleCapExceeded { .. } => ("SampleCapExceeded", EXIT_NUMERICAL),
            Error::NotQuantized { .. } => ("NotQuantized", EXIT_NUMERICAL),
            Error::Unstable { .. } => ("Unstable", EXIT_NUMERICAL),
            Error::Aliasing { .. } => ("Aliasing", EXIT_NUMERICAL),
            Error::RankDeficient { .. } => ("RankDeficient", EXIT_NUMERICAL),
            Error::NotSymmetric(_) => ("NotSymmetric", EXIT_NUMERICAL),
        };
        Self {
            status,
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

/// Builds the config from parsed arguments.
fn resolve(cli: Cli) -> Result<(RunConfig, Option<PathBuf>), Failure> {
    let mut config = match (cli.config, cli.command) {
        (Some(path), None) => RunConfig::load(&path)?,
        (None, Some(op)) => RunConfig::new(op),
        (Some(_), Some(_)) => return Err(Failure::invalid("Usage", "give either a subcommand or --config, not both")),
        (None, None) => return Err(Failure::invalid("Usage", "a subcommand or --config is required (see --help)")),
    };
    if cli.output.is_some() {
        config.output_path = cli.output;
    }
    if let Some(f) = cli.format {
        config.format = f;
    }
    config.mhz2pi |= cli.mhz2pi;
    config.validate()?;
    Ok((config, cli.save_config))
}

fn thread_count() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::invalid(
                "InvalidParams",
                format!("{THREADS_ENV} must be a positive integer, got `{v}`"),
            )),
        },
    }
}

fn io_failure(what: &str, e: std::io::Error) -> Failure {
    Failure {
        status: EXIT_NUMERICAL,
        kind: "Io".into(),
        message: format!("{what}: {e}"),
    }
}

/// Runs a config and writes its outputs. Returns the summary line and whether
/// the data went to standard output.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<String, Failure> {
    let threads = thread_count()?;
    let report = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::invalid("InvalidParams", e.to_string()))?
            .install(|| execute(config)),
        None => execute(config),
    }?;
    match config.output_path.as_deref() {
        None => {}
        Some("-") => report
            .table
            .write(stdout, config, &report.summary)
            .map_err(|e| io_failure("stdout", e))?,
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            let mut out = BufWriter::new(file);
            report
                .table
                .write(&mut out, config, &report.summary)
                .and_then(|()| out.flush())
                .map_err(|e| io_failure(path, e))?;
        }
    }
    Ok(report.summary)
}

/// Full command line: parse, run, report. The summary goes to standard
/// output, or to standard error when the data itself is written there.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let failure = Failure::invalid("Usage", e.to_string().trim().to_string());
            let _ = writeln!(stderr, "{}", failure.record());
            return failure.status;
        }
    };
    let outcome = resolve(cli).and_then(|(config, save)| {
        if let Some(path) = save {
            std::fs::write(&path, config.to_json() + "\n").map_err(|e| io_failure(&path.display().to_string(), e))?;
        }
        let summary = run(&config, stdout)?;
        Ok((summary, config.output_path.as_deref() == Some("-")))
    });
    match outcome {
        Ok((summary, data_on_stdout)) => {
            let sink: &mut dyn Write = if data_on_stdout { stderr } else { stdout };
            let _ = writeln!(sink, "{summary}");
            EXIT_OK
        }
        Err(failure) => {
            let _ = writeln!(stderr, "{}", failure.record());
            failure.status
        }
    }
}

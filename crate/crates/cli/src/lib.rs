//! The `normforge` command line: JSON norm specifications in, JSON reports
//! and CSV plot data out.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use normforge_core::normspec::DEFAULT_DIM_CAP;
use normforge_core::{Error, VertexConfig};
use thiserror::Error as ThisError;

pub mod commands;
pub mod files;
pub mod report;

pub const DIM_CAP_VAR: &str = "NORMFORGE_DIM_CAP";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) | CliError::Io(_) => EXIT_PARSE,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }

    pub fn with_context(self, context: &str) -> Self {
        let wrap = |m: String| format!("{context}: {m}");
        match self {
            CliError::Usage(m) => CliError::Usage(wrap(m)),
            CliError::Parse(m) => CliError::Parse(wrap(m)),
            CliError::Io(m) => CliError::Io(wrap(m)),
            CliError::Cap(m) => CliError::Cap(wrap(m)),
            CliError::Verification(m) => CliError::Verification(wrap(m)),
        }
    }
}

/// Maps a library error onto the exit-code classes.
pub fn core_error(context: &str, e: Error) -> CliError {
    let msg = format!("{context}: {e}");
    match e {
        Error::CapExceeded { .. } => CliError::Cap(msg),
        Error::InvalidParameter(_) | Error::OutOfRange(_) => CliError::Usage(msg),
        Error::NoAdmissibleLevel(_) | Error::Solver(_) => CliError::Verification(msg),
        _ => CliError::Parse(msg),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "normforge",
    version,
    about = "Finite-support approximation of polyhedral norms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Leveling decomposition of a functional, with h/j tables and identity checks
    Level {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        functional: PathBuf,
        /// Restrict the tables to a single level n
        #[arg(long)]
        n: Option<usize>,
    },
    /// Build an ε-approximating norm with leveled boundary functionals
    Approximate {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        m_extra: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an approximation file against its source norm
    Verify {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        approx: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Per-vertex sandwich table
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Smooth p-power norm: equivalence and gradient checks on sampled points
    Smooth {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Per-sample table
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Strongly exposed points of the dual ball, separation checks and D_{n,m} classes
    Analyze {
        #[arg(long)]
        norm: PathBuf,
        /// Per-point table
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Vertex enumeration limits, honoring `NORMFORGE_DIM_CAP`.
pub fn vertex_config() -> Result<VertexConfig, CliError> {
    let dim_cap = match std::env::var(DIM_CAP_VAR) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => cap,
            _ => {
                return Err(CliError::Usage(format!(
                    "{DIM_CAP_VAR} must be a positive integer, got {raw:?}"
                )))
            }
        },
        Err(_) => DEFAULT_DIM_CAP,
    };
    Ok(VertexConfig {
        dim_cap,
        ..VertexConfig::default()
    })
}

/// Parses `args` (program name first), runs the command, prints the report
/// to stdout and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match commands::execute(&cli.command) {
        Ok(report) => {
            print!("{}", files::to_json(&report));
            if report.passed() {
                0
            } else {
                eprintln!("error: verification failed");
                EXIT_VERIFY
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

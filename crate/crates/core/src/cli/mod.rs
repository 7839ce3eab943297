//! The `cutterkit` command line.
//!
//! ```text
//! cutterkit example-paper [--out DIR]   two lines at pi/6: MAP, DR and the product iteration
//! cutterkit run CONFIG                  run the methods of a JSON config, write CSV/SVG/report
//! cutterkit verify CONFIG               sample every hypothesis inequality, print PROBE lines
//! ```
//!
//! Global flags `--seed N`, `--iters N` and `--tol X` override the config.
//!
//! | exit | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | usage or config parse error |
//! | 3 | validation or hypothesis error (e.g. `lambda*mu >= 4`) |
//! | 4 | a probe failed |
//! | 5 | I/O error |
//! | 6 | dimension mismatch |

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_example_paper, cmd_run, cmd_verify, run_methods, verify, Overrides, Verification};
pub use config::{Driver, ExperimentConfig, MethodSpec, OperatorSpec, Outputs, ProbeSpec, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Config = 2,
    Validation = 3,
    Probe = 4,
    Io = 5,
    Dimension = 6,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Config,
            message: msg.into(),
        }
    }
    pub fn validation(msg: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Validation,
            message: msg.into(),
        }
    }
    pub fn io(msg: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Io,
            message: msg.into(),
        }
    }
    pub fn dimension(msg: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Dimension,
            message: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Parser, Debug)]
#[command(
    name = "cutterkit",
    version,
    about = "Products of relaxed cutters: runs and numerical certificates"
)]
pub struct Cli {
    /// Seed for the probe samplers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of iterations.
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// Probe tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reproduce the two-lines experiment.
    ExamplePaper {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the methods of a config.
    Run { config: PathBuf },
    /// Check every hypothesis inequality on samples.
    Verify { config: PathBuf },
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::Config as i32 } else { 0 };
        }
    };
    let overrides = Overrides {
        seed: cli.seed,
        iterations: cli.iters,
        tolerance: cli.tol,
    };
    let result = match &cli.command {
        Command::ExamplePaper { out } => cmd_example_paper(out, &overrides).map(|r| (r, true)),
        Command::Run { config } => cmd_run(config, &overrides).map(|r| (r, true)),
        Command::Verify { config } => cmd_verify(config, &overrides),
    };
    match result {
        Ok((report, passed)) => {
            print!("{report}");
            if passed {
                0
            } else {
                ExitCode::Probe as i32
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code as i32
        }
    }
}

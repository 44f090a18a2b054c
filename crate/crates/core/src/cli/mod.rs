//! Command-line front end.
//!
//! ```text
//! harmap [--config FILE] [--key.path VALUE]...
//! ```
//!
//! The command itself is the `command` key, so `harmap --command sweep --pair.n 4` is a complete
//! invocation. Outputs go to `output_dir`; logs go to stderr.

mod config;
mod output;

use clap::Parser;
use std::path::PathBuf;
use thiserror::Error;

pub use config::{known_keys, Command, RawConfig, RunConfig};
pub use output::{format_num, MonitorsReport};

use crate::analysis::AnalysisError;
use crate::integrator::IntegrationError;
use crate::shooting::ShootingError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("numerical failure during {stage}: {message}")]
    Numerical {
        stage: &'static str,
        message: String,
    },
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Output { .. } => EXIT_CONFIG,
            CliError::Numerical { .. } => EXIT_NUMERICAL,
        }
    }

    pub(crate) fn numerical(stage: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Numerical {
            stage,
            message: e.to_string(),
        }
    }
}

impl From<IntegrationError> for CliError {
    fn from(e: IntegrationError) -> Self {
        CliError::numerical("integration", e)
    }
}

impl From<ShootingError> for CliError {
    fn from(e: ShootingError) -> Self {
        CliError::numerical("sweep", e)
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::numerical("analysis", e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "harmap",
    version,
    about = "Shooting experiments for rotationally symmetric harmonic maps between punctured model spaces",
    after_help = "Every config key can be overridden as `--key.path VALUE`, e.g. `--pair.n 4 --command sweep`.\nPrecedence: flags > config file > defaults."
)]
struct Cli {
    /// JSON run configuration (flat dotted keys or nested objects)
    #[arg(long)]
    config: Option<PathBuf>,

    /// List every config key with its default and exit
    #[arg(long)]
    list_keys: bool,

    /// Config overrides as `--key.path VALUE` pairs
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    overrides: Vec<String>,
}

impl Cli {
    /// Once an override has started the trailing list, clap hands `--config` and
    /// `--list-keys` over as overrides too. Pull them back out.
    fn hoist_own_flags(&mut self) -> Result<(), CliError> {
        let mut rest = Vec::with_capacity(self.overrides.len());
        let mut it = std::mem::take(&mut self.overrides).into_iter();
        while let Some(a) = it.next() {
            if a == "--list-keys" {
                self.list_keys = true;
            } else if a == "--config" {
                let path = it.next().ok_or_else(|| CliError::Config {
                    key: "config".into(),
                    message: "missing file path".into(),
                })?;
                self.config = Some(PathBuf::from(path));
            } else if let Some(path) = a.strip_prefix("--config=") {
                self.config = Some(PathBuf::from(path));
            } else {
                rest.push(a);
            }
        }
        self.overrides = rest;
        Ok(())
    }
}

/// Parse arguments, run the configured command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Err(e) = cli.hoist_own_flags() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    if cli.list_keys {
        let raw = RawConfig::defaults();
        for (k, v) in raw.entries() {
            println!("{k} = {v}");
        }
        return EXIT_OK;
    }
    let result = RunConfig::load(cli.config.as_deref(), &cli.overrides).and_then(|cfg| {
        log::info!(
            "running {} for n={} {}",
            cfg.command.name(),
            cfg.pair.n.get(),
            cfg.pair.target.name()
        );
        execute(&cfg)
    });
    match result {
        Ok(written) => {
            for p in written {
                println!("{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run one configured command and return the files written.
pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    output::execute(cfg)
}

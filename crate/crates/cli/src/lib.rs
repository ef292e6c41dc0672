//! Command-line driver for `gepup-core`: configuration, CSV and VTK output.

pub mod commands;
pub mod config;
pub mod output;
pub mod vtk;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{text_pairs, ConfigError, Mode, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] gepup_core::Error),
    #[error("simulation failed: {0}")]
    Simulation(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gepup",
    version,
    about = "GePUP finite-element incompressible Navier-Stokes solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one case, writing monitors, VTK snapshots and coefficients.
    Run(ConfigArgs),
    /// Run a case on several levels and tabulate errors and rates.
    Converge(ConfigArgs),
    /// Check the shipped Runge-Kutta tableaus.
    ValidateTableaus {
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
}

/// Every key may also come from `--config FILE` (`key = value` lines);
/// flags take precedence.
#[derive(Debug, Args)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    re: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    level: Option<String>,
    /// Consecutive levels, `3..6` or `3,4,5,6`.
    #[arg(long)]
    levels: Option<String>,
    /// Coarse mesh cells, `NX` or `NXxNY`.
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long)]
    cr: Option<String>,
    #[arg(long)]
    t0: Option<String>,
    #[arg(long = "t-end")]
    t_end: Option<String>,
    #[arg(long = "dt-max")]
    dt_max: Option<String>,
    #[arg(long = "fixed-dt")]
    fixed_dt: Option<String>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long = "snapshot-interval")]
    snapshot_interval: Option<String>,
    #[arg(long = "rebuild-interval")]
    rebuild_interval: Option<String>,
    #[arg(long)]
    tol: Option<String>,
}

impl ConfigArgs {
    fn resolve(self, mode: Mode) -> Result<RunConfig, CliError> {
        let mut pairs = match &self.config {
            Some(path) => text_pairs(&std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
            })?)?,
            None => Vec::new(),
        };
        let flags = [
            ("case", self.case),
            ("re", self.re),
            ("degree", self.degree),
            ("level", self.level),
            ("levels", self.levels),
            ("base", self.base),
            ("integrator", self.integrator),
            ("cr", self.cr),
            ("t0", self.t0),
            ("t-end", self.t_end),
            ("dt-max", self.dt_max),
            ("fixed-dt", self.fixed_dt),
            ("output", self.output),
            ("snapshot-interval", self.snapshot_interval),
            ("rebuild-interval", self.rebuild_interval),
            ("tol", self.tol),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                pairs.retain(|(k, _)| k != key);
                pairs.push((key.to_string(), v));
            }
        }
        Ok(RunConfig::from_pairs(mode, pairs)?)
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => a
            .resolve(Mode::Run)
            .and_then(|c| commands::run(&c, out).map(|_| ())),
        Command::Converge(a) => a
            .resolve(Mode::Converge)
            .and_then(|c| commands::converge(&c, out).map(|_| ())),
        Command::ValidateTableaus { tol } => commands::validate_tableaus(tol, out).and_then(|ok| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Simulation("tableau validation failed".into()))
            }
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

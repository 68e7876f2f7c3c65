//! `casimir-mag`: distance sweeps of the Casimir energy, force and their
//! magnetization-dependent parts, comparisons against the closed-form
//! limits, and sphere-plate detectability reports.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 numerical non-convergence
//! (rows are still written and flagged), 4 I/O error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;
pub mod quantity;
pub mod spectrum;

use commands::Status;
use config::{Format, RunConfig};

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "CASIMIR_MAG_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "casimir-mag", version, about = "Casimir magnetic interaction between magnetized mirrors")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output if omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Relative quadrature tolerance, overriding the config.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for sweeps (0: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// E_FM, E_AF and their difference per area.
    Energy,
    /// F_FM, F_AF and their difference per area.
    Force,
    /// Quadrature against the closed-form limits, with fitted slopes.
    Compare,
    /// Sphere-plate signal against the cantilever noise floors.
    Detect,
    /// Material checks.
    Materials {
        #[command(subcommand)]
        action: MaterialsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum MaterialsAction {
    /// Parse every material and check its response.
    Validate,
}

fn threads(flag: Option<usize>) -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}: `{v}` is not a thread count"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

fn execute(cli: &Cli) -> Result<Status, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(tol) = cli.tol {
        cfg.quadrature.rel_tol = tol;
        cfg.quadrature.validate().map_err(commands::core_error)?;
    }
    let format = cli.format.unwrap_or(cfg.format);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads(cli.threads)?)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    for m in &cfg.materials {
        if let casimir_mag_core::casimir::Mirror::Dielectric(model) = &m.mirror {
            for w in model.warnings() {
                eprintln!("warning: material `{}`: {w}", m.name);
            }
        }
    }

    let outcome = match cli.command {
        Command::Energy => commands::energy(&cfg, &pool)?,
        Command::Force => commands::force(&cfg, &pool)?,
        Command::Compare => commands::compare(&cfg, &pool)?,
        Command::Detect => commands::detect(&cfg, &pool)?,
        Command::Materials { action: MaterialsAction::Validate } => commands::validate_materials(&cfg)?,
    };
    let text = match format {
        Format::Csv => outcome.table.to_csv(),
        Format::Json => outcome.table.to_json(cfg.provenance()),
    };
    match cli.output.as_ref().or(cfg.output.as_ref()) {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
    }
    Ok(outcome.status)
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(Status::Ok) => 0,
        Ok(Status::Flagged) => {
            eprintln!("warning: some rows did not converge or could not be evaluated exactly; see the status columns");
            3
        }
        Ok(Status::Invalid) => {
            eprintln!("error: a material failed validation");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! Configuration, subcommands and report files for the `rfh` binary.
//!
//! Every command parses and validates its configuration before touching the output
//! directory, so a rejected config leaves no files behind.

pub mod config;
pub mod find;
pub mod homology;
pub mod output;
pub mod setup;
pub mod spectrum;
pub mod verify;

use std::path::{Path, PathBuf};

use rfh_core::algebra::AlgebraError;
use rfh_core::solver::SolverError;
use rfh_core::symplectic::SymplecticError;
use thiserror::Error;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io(_) | Self::Failure(_) => 1,
        }
    }
}

// Problem construction is the only place these surface through `?`, and there they
// always mean the configured geometry is unusable.
impl From<SymplecticError> for CliError {
    fn from(e: SymplecticError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        Self::Failure(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Homology,
    Find,
    Spectrum,
    Verify,
}

/// Command-line values that win over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub quantum: Option<f64>,
    pub points: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunStatus {
    /// Whether the command's acceptance predicate held.
    pub ok: bool,
    pub message: String,
}

impl RunStatus {
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::from_file(path)?;
    if let Some(out) = &overrides.out {
        c.out = out.clone();
    }
    if let Some(q) = overrides.quantum {
        if !(q > 0.0 && q.is_finite()) {
            return Err(CliError::Config(format!("--quantum {q}: must be positive")));
        }
        c.quantum = q;
    }
    if let Some(p) = &overrides.points {
        c.points = Some(p.clone());
    }
    if overrides.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    Ok(c)
}

pub fn run_command(cmd: Command, c: &RunConfig, jobs: Option<usize>) -> Result<RunStatus, CliError> {
    let dir = c.out.as_path();
    match cmd {
        Command::Homology => {
            let o = homology::run_homology(c)?;
            output::ensure_dir(dir)?;
            homology::write_homology(&o, c, dir)?;
            let message = if o.pattern_ok() {
                format!("rank pattern holds for n = {}, K = {}", c.n, c.algebra_window)
            } else {
                format!("rank pattern violated: {}", o.mismatches.join("; "))
            };
            Ok(RunStatus { ok: o.pattern_ok(), message })
        }
        Command::Find => {
            let o = find::run_find(c, jobs)?;
            output::ensure_dir(dir)?;
            find::write_find(&o, c, dir)?;
            let message = format!(
                "{} verified reports, {} distinct, {} on closed characteristics",
                o.verified(),
                o.clusters.len(),
                o.closed_flags()
            );
            Ok(RunStatus { ok: o.verified() > 0, message })
        }
        Command::Spectrum => {
            let o = spectrum::run_spectrum(c, dir)?;
            output::ensure_dir(dir)?;
            spectrum::write_spectrum(&o, c, dir)?;
            let message = match &o.fit {
                Some(f) => format!("fitted quantum {} ({} × 2π), R² = {}", f.quantum, f.ratio_to_two_pi, f.r_squared),
                None => format!("{} algebraic values", o.algebraic.len()),
            };
            Ok(RunStatus { ok: true, message })
        }
        Command::Verify => {
            let points = verify::read_points(&verify::points_path(c, dir), c.n)?;
            let results = verify::run_verify(c, points)?;
            output::ensure_dir(dir)?;
            verify::write_verify(&results, c, dir)?;
            let verified = results.iter().filter(|v| v.verified).count();
            Ok(RunStatus { ok: true, message: format!("{verified} of {} points verified", results.len()) })
        }
    }
}

pub fn run(cmd: Command, config: &Path, overrides: &Overrides) -> Result<RunStatus, CliError> {
    let c = load_config(config, overrides)?;
    run_command(cmd, &c, overrides.jobs)
}

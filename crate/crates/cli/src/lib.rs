//! Front end for the subsonic flow solver: configuration, subcommands and
//! file formats. The binary in `main.rs` only parses arguments and maps
//! errors to exit codes.

pub mod config;
pub mod fieldio;
pub mod run;

use subsonic_core::invariants::InvariantError;
use subsonic_core::solver::SolverError;
use thiserror::Error;

/// Exit statuses of the command-line tool.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
    pub const INADMISSIBLE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Solver(SolverError),
    #[error("no convergence after {iterations} iterations, last difference {last_diff:e}")]
    NotConverged { iterations: usize, last_diff: f64 },
    #[error(transparent)]
    Invariant(InvariantError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => exit::IO,
            CliError::Config(_) => exit::CONFIG,
            CliError::Solver(SolverError::Setup(_)) => exit::CONFIG,
            CliError::Solver(e) if e.is_sonic_or_stagnation() => exit::INADMISSIBLE,
            CliError::Solver(_) | CliError::NotConverged { .. } => exit::NOT_CONVERGED,
            CliError::Invariant(_) => exit::INADMISSIBLE,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io_error",
            CliError::Config(_) => "config_error",
            CliError::Solver(e) => match e {
                SolverError::Sonic { .. } => "sonic",
                SolverError::Stagnation { .. } => "stagnation",
                SolverError::Linear { .. } => "linear_solver_failure",
                SolverError::NonFinite { .. } => "non_finite",
                SolverError::DeltaExceeded { .. } => "delta_exceeded",
                SolverError::Setup(_) => "config_error",
            },
            CliError::NotConverged { .. } => "not_converged",
            CliError::Invariant(_) => "inadmissible_field",
        }
    }

    /// One machine-parsable line for the diagnostic stream, e.g.
    /// `status=sonic exit=4 step=elliptic detail="..."`.
    pub fn status_line(&self) -> String {
        let mut line = format!("status={} exit={}", self.status(), self.exit_code());
        if let CliError::Solver(e) = self {
            if let Some(step) = e.step() {
                line.push_str(&format!(" step={step}"));
            }
        }
        let detail = self.to_string().replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
        line.push_str(&format!(" detail=\"{detail}\""));
        line
    }
}

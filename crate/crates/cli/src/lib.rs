//! Command-line front end: strict run configurations, a scenario library,
//! verification suites and the simulation and Taylor runners.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical failure.

pub mod config;
pub mod run;
pub mod scenarios;
pub mod verify;

use lagpath::dynamics::DynamicsError;
use lagpath::taylorstep::TaylorError;

pub use config::{Plan, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::NumericalFailure(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<TaylorError> for CliError {
    fn from(e: TaylorError) -> Self {
        match e {
            TaylorError::Dynamics(d) => d.into(),
            TaylorError::NumericalFailure(_) | TaylorError::SingularDisplacement | TaylorError::NoFiniteRadius => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

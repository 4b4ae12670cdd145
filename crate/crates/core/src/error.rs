use thiserror::Error;

use crate::dae::DaeError;
use crate::electrochem::ElectroError;
use crate::scenario::ConfigError;
use crate::thermo::ThermoError;
use crate::units::UnitError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Electro(#[from] ElectroError),
    #[error(transparent)]
    Unit(#[from] UnitError),
    #[error(transparent)]
    Dae(#[from] DaeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True when the failure came from solving the model (initialization,
    /// integration, steady state, guard) rather than from the configuration
    /// or file system.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::Dae(e) => !matches!(e, DaeError::Parameter { .. } | DaeError::Input(_)),
            _ => false,
        }
    }
}

//! Mass and energy balances of the individual plant units.
//!
//! Every function here is a pure function of its arguments. Differential
//! units (stack temperature, separators, tank) return right-hand sides;
//! static units (compressor stages, heat exchangers, mixer) and the vessel
//! closures return residuals or solved outlet states.

pub mod compressor;
pub mod heat_exchanger;
pub mod mixer;
pub mod separator;
pub mod stack;
pub mod tank;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::electrochem::ElectroError;
use crate::thermo::ThermoError;

pub use compressor::{CompressorTrain, StageRecord, TrainResult};
pub use separator::SeparatorState;
pub use stack::FlowSplit;
pub use tank::TankState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("cathode water starvation: inlet water short by {deficit} mol/s")]
    WaterStarvation { deficit: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("vessel holds no gas; pressure is undetermined")]
    EmptyGasHoldup,
    #[error("{what} temperature {t} K outside liquid-water guard [{min}, {max}] K")]
    TemperatureGuard { what: String, t: f64, min: f64, max: f64 },
    #[error("no flow: {0}")]
    NoFlow(String),
    #[error("{0}")]
    Convergence(String),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Electro(#[from] ElectroError),
}

/// Bounds on liquid-water temperatures (freeze/boil guard).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TemperatureGuard {
    /// K
    pub min: f64,
    /// K
    pub max: f64,
}

impl Default for TemperatureGuard {
    fn default() -> Self {
        TemperatureGuard { min: 274.0, max: 372.0 }
    }
}

impl TemperatureGuard {
    pub fn check(&self, what: &str, t: f64) -> Result<(), UnitError> {
        if t >= self.min && t <= self.max {
            Ok(())
        } else {
            Err(UnitError::TemperatureGuard { what: what.to_string(), t, min: self.min, max: self.max })
        }
    }
}

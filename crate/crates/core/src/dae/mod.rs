//! Plant DAE: residual, consistent initialization, implicit Euler
//! integration and steady-state solves.

pub mod design;
pub mod init;
pub mod integrator;
pub mod layout;
pub mod model;
pub mod simulate;
pub mod steady;

use thiserror::Error;

use crate::units::UnitError;

pub use design::{balanced_inputs, BalancedPoint};
pub use init::consistent_init;
pub use integrator::{Integrator, SolverSettings, SolverStats};
pub use layout::{AlgebraicVars, DifferentialVars, Disturbances, Inputs, PlantState, EQUATION_NAMES, N_ALG, N_DIFF, N_EQ};
pub use model::{Evaluation, Outputs, Plant, PlantParams, Scales};
pub use simulate::{
    simulate, ConstantInputs, DiscontinuityEvent, InputSchedule, Sample, SimulationOptions, Termination, Trajectory,
};
pub use steady::{steady_state, SteadyState};

fn equation_name(index: &Option<usize>) -> &'static str {
    index.and_then(|i| EQUATION_NAMES.get(i).copied()).unwrap_or("none")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DaeError {
    #[error("invalid parameter {field}: {message}")]
    Parameter { field: String, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("equation {index} ({name}): {source}")]
    Equation { index: usize, name: &'static str, source: UnitError },
    #[error("consistent initialization failed: {reason} (worst equation: {})", equation_name(.worst))]
    Initialization { reason: String, worst: Option<usize> },
    #[error(
        "integration failed at t = {t} s with step {h:.3e} s: {reason}; worst scaled residual {residual:.3e} in equation {}; condition estimate {condition:.3e}",
        equation_name(.worst)
    )]
    StepFailure { t: f64, h: f64, reason: String, worst: Option<usize>, residual: f64, condition: f64 },
    #[error("t = {t} s: {source}")]
    Guard { t: f64, source: UnitError },
    #[error("steady-state solve failed: {0}")]
    SteadyState(String),
}

impl DaeError {
    pub fn equation(index: usize, source: UnitError) -> Self {
        DaeError::Equation { index, name: EQUATION_NAMES[index], source }
    }

    /// Index of the equation the error points at, if any.
    pub fn worst_equation(&self) -> Option<usize> {
        match self {
            DaeError::Equation { index, .. } => Some(*index),
            DaeError::Initialization { worst, .. } | DaeError::StepFailure { worst, .. } => *worst,
            _ => None,
        }
    }

    /// True for the freeze/boil guard, wherever it fired.
    pub fn is_guard_violation(&self) -> bool {
        matches!(
            self,
            DaeError::Guard { .. } | DaeError::Equation { source: UnitError::TemperatureGuard { .. }, .. }
        )
    }
}

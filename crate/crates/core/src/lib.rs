//! Dynamic model of an alkaline electrolyzer plant.
//!
//! The plant (stack, gas/liquid separators, three-stage hydrogen compressor,
//! storage tank, recirculation heat exchangers and make-up mixer) is written as
//! a semi-explicit index-1 DAE with 9 differential and 15 algebraic equations:
//!
//! ```text
//!   dx/dt = f(x, y, u, d, p)
//!       0 = g(x, y, u, d, p)
//! ```
//!
//! Layout of the modules:
//!
//! - [`thermo`]: enthalpy, entropy, volume, internal and Gibbs energy of
//!   H2O/H2/O2 streams and holdups.
//! - [`electrochem`]: reversible voltage, overvoltages, Faraday efficiency and
//!   the stack's electrical closure.
//! - [`units`]: mass and energy balances of each plant unit.
//! - [`dae`]: residual assembly, consistent initialization and the implicit
//!   Euler integrator.
//! - [`scenario`]: scenario files, input schedules, CSV and plot output.

// Range checks are written as `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dae;
pub mod electrochem;
pub mod error;
pub mod numeric;
pub mod scenario;
pub mod species;
pub mod thermo;
pub mod units;

pub use dae::{
    AlgebraicVars, DifferentialVars, Disturbances, Inputs, Plant, PlantParams, PlantState,
    SolverSettings, Trajectory,
};
pub use electrochem::StackParams;
pub use error::{Error, Result};
pub use scenario::ScenarioConfig;
pub use species::{Species, SpeciesVec};
pub use thermo::{Phase, ThermoModel, ThermoState};

//! Hydrogen storage tank.

use serde::{Deserialize, Serialize};

use super::separator::{holdup_internal_energy, holdup_volume, solve_holdup_closure};
use super::UnitError;
use crate::species::{Species, SpeciesVec, GAS_CONSTANT};
use crate::thermo::{Phase, ThermoModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TankParams {
    /// m^3
    pub volume: f64,
    /// W/m^2/K
    pub heat_transfer_coefficient: f64,
    /// m^2
    pub heat_transfer_area: f64,
}

impl Default for TankParams {
    fn default() -> Self {
        TankParams { volume: 50.0, heat_transfer_coefficient: 5.0, heat_transfer_area: 10.0 }
    }
}

impl TankParams {
    pub fn conductance(&self) -> f64 {
        self.heat_transfer_coefficient * self.heat_transfer_area
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TankState {
    /// mol H2
    pub n: f64,
    /// J
    pub u: f64,
    /// K
    pub t: f64,
    /// Pa
    pub p: f64,
    pub params: TankParams,
}

impl TankState {
    pub fn from_conditions(thermo: &ThermoModel, t: f64, p: f64, params: TankParams) -> Result<Self, UnitError> {
        let n = p * params.volume / (GAS_CONSTANT * t);
        let u = holdup_internal_energy(thermo, t, p, &Self::holdup(n))?;
        Ok(TankState { n, u, t, p, params })
    }

    pub fn holdup(n: f64) -> SpeciesVec {
        crate::species::pure(Species::Hydrogen, n)
    }
}

/// `(dn/dt, dU/dt)`; both enthalpy flows are taken at tank conditions.
pub fn tank_rhs(thermo: &ThermoModel, s: &TankState, f_in: f64, f_out: f64, t_amb: f64) -> Result<(f64, f64), UnitError> {
    if !(f_in >= 0.0 && f_out >= 0.0) {
        return Err(UnitError::Precondition("tank flows must be non-negative".into()));
    }
    let h = |f: f64| thermo.enthalpy_flow(s.t, s.p, &TankState::holdup(f), Phase::Gas);
    let du = h(f_in)? - h(f_out)? - s.params.conductance() * (s.t - t_amb);
    Ok((f_in - f_out, du))
}

/// `[U_TL - U_tank, V_TL - V_tank]`
pub fn tank_closure(thermo: &ThermoModel, s: &TankState) -> Result<[f64; 2], UnitError> {
    let n = TankState::holdup(s.n);
    Ok([
        holdup_internal_energy(thermo, s.t, s.p, &n)? - s.u,
        holdup_volume(thermo, s.t, s.p, &n)? - s.params.volume,
    ])
}

pub fn solve_tank_closure(thermo: &ThermoModel, n: f64, u: f64, params: &TankParams) -> Result<(f64, f64), UnitError> {
    solve_holdup_closure(thermo, &TankState::holdup(n), u, params.volume)
}

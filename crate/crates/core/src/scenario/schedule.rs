//! Piecewise-constant schedules in SI units.

use super::config::{Signal, Unit};
use crate::dae::{Disturbances, InputSchedule, Inputs};
use crate::electrochem::KELVIN_OFFSET;
use crate::species::Species;
use crate::thermo::ThermoModel;

/// Converts a scheduled value to SI. `species` gives the molar mass for kg/s.
pub fn to_si(thermo: &ThermoModel, unit: Unit, value: f64, species: Species) -> f64 {
    match unit {
        Unit::MolPerSecond | Unit::W | Unit::K => value,
        Unit::KgPerSecond => value / thermo.molar_mass(species),
        Unit::KiloWatt => value * 1e3,
        Unit::MegaWatt => value * 1e6,
        Unit::Celsius => value + KELVIN_OFFSET,
    }
}

/// One channel: breakpoints and SI values.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub steps: Vec<(f64, f64)>,
}

impl Channel {
    pub fn constant(value: f64) -> Self {
        Channel { steps: vec![(0.0, value)] }
    }

    pub fn from_signal(thermo: &ThermoModel, signal: &Signal, species: Species) -> Self {
        Channel { steps: signal.steps.iter().map(|&(t, v)| (t, to_si(thermo, signal.unit, v, species))).collect() }
    }

    /// Value in force at `t` (right-continuous).
    pub fn at(&self, t: f64) -> f64 {
        let k = self.steps.partition_point(|s| s.0 <= t);
        self.steps[k.saturating_sub(1)].1
    }
}

/// Schedules for all 8 inputs and 3 disturbances.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub inputs: [Channel; 8],
    pub disturbances: [Channel; 3],
}

impl InputSchedule for Schedule {
    fn at(&self, t: f64) -> (Inputs, Disturbances) {
        let u: Vec<f64> = self.inputs.iter().map(|c| c.at(t)).collect();
        let d: Vec<f64> = self.disturbances.iter().map(|c| c.at(t)).collect();
        (Inputs::from_array(&u), Disturbances::from_array(&d))
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .inputs
            .iter()
            .chain(&self.disturbances)
            .flat_map(|c| c.steps.iter().map(|s| s.0))
            .filter(|t| *t > 0.0)
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use alkplant_core::dae::{balanced_inputs, consistent_init};
use alkplant_core::scenario::{self, Signal, Unit};
use alkplant_core::{Disturbances, Inputs, Plant, PlantParams, PlantState, ScenarioConfig};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

/// The shipped 1 MW -> 2.5 MW step scenario that runs to completion.
pub fn feasible_step() -> ScenarioConfig {
    ScenarioConfig::load(scenario_path("feasible_step.scenario")).expect("shipped scenario loads")
}

/// A consistent plant state at 1 MW, 70 degC, with the inputs holding it there.
pub fn operating_point() -> (Plant, PlantState, Inputs, Disturbances) {
    let plant = Plant::new(PlantParams::default()).expect("default parameters are valid");
    let d = Disturbances { t_amb: 298.15, power: 1.0e6, t_make_up: 303.15 };
    let u = balanced_inputs(&plant, &d, 343.15, 500.0).expect("design point exists").inputs;
    let mut cfg = ScenarioConfig::minimal(0.0, Signal::constant(Unit::MegaWatt, 1.0));
    cfg.initial.stack_temperature = 343.15;
    cfg.initial.separator_temperature = 343.15;
    cfg.initial.separator_liquid_fraction = 0.3;
    cfg.initial.tank_pressure = 3e6;
    let x = scenario::initial_state(&cfg, &plant).expect("initial state");
    let y = consistent_init(&plant, &x, None, &u, &d, 1e-8).expect("consistent start");
    (plant, PlantState { x, y }, u, d)
}

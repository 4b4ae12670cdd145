//! Scenario files, input schedules and run output.

pub mod config;
pub mod output;
pub mod schedule;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::dae::{
    balanced_inputs, simulate, steady_state, AlgebraicVars, DifferentialVars, Disturbances, InputSchedule, Inputs,
    Plant, SimulationOptions, SteadyState, Trajectory,
};
use crate::error::{Error, Result};
use crate::species::Species;
use crate::units::{SeparatorState, TankState};

pub use config::{DesignPoint, InitialConditions, OutputConfig, ScenarioConfig, Signal, Signals, Unit};
pub use output::{emit_plot_data, find_column, summarize, write_csv, write_csv_file, Column, Summary, COLUMNS};
pub use schedule::{Channel, Schedule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Range { field: String, message: String },
    #[error("unknown channel '{0}'")]
    UnknownChannel(String),
    #[error("design point: {0}")]
    Design(String),
}

/// Everything needed to integrate a scenario.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    pub plant: Plant,
    pub schedule: Schedule,
    pub x0: DifferentialVars,
    pub options: SimulationOptions,
}

/// Species whose molar mass converts a kg/s schedule on each input channel.
const INPUT_SPECIES: [Species; 8] = [
    Species::Water,
    Species::Water,
    Species::Water,
    Species::Hydrogen,
    Species::Water,
    Species::Water,
    Species::Oxygen,
    Species::Hydrogen,
];

/// Builds the SI schedule, filling omitted inputs from the design point.
pub fn build_schedule(config: &ScenarioConfig, plant: &Plant) -> std::result::Result<Schedule, ConfigError> {
    let th = plant.thermo();
    let disturbances = config.signals.disturbances().map(|(_, s)| Channel::from_signal(th, s, Species::Water));
    let d0: Vec<f64> = disturbances.iter().map(|c| c.at(0.0)).collect();
    let d0 = Disturbances::from_array(&d0);

    let given = config.signals.inputs();
    let design = if given.iter().any(|(_, s)| s.is_none()) {
        let p = balanced_inputs(plant, &d0, config.design.stack_temperature, config.design.recirculation)
            .map_err(|e| ConfigError::Design(e.to_string()))?;
        Some(p.inputs.to_array())
    } else {
        None
    };
    let inputs = std::array::from_fn(|i| match given[i].1 {
        Some(s) => Channel::from_signal(th, s, INPUT_SPECIES[i]),
        None => Channel::constant(design.expect("design computed when an input is omitted")[i]),
    });
    Ok(Schedule { inputs, disturbances })
}

/// Differential state described by the initial-condition block.
pub fn initial_state(config: &ScenarioConfig, plant: &Plant) -> Result<DifferentialVars> {
    let th = plant.thermo();
    let ic = &config.initial;
    let p = &plant.params;
    let sep = |gas, volume: f64| {
        SeparatorState::from_conditions(
            th,
            gas,
            ic.separator_temperature,
            ic.separator_pressure,
            volume,
            ic.separator_liquid_fraction * volume,
        )
    };
    let s1 = sep(Species::Oxygen, p.separator1_volume)?;
    let s2 = sep(Species::Hydrogen, p.separator2_volume)?;
    let tank = TankState::from_conditions(th, ic.tank_temperature, ic.tank_pressure, p.tank)?;
    Ok(DifferentialVars {
        t_stack: ic.stack_temperature,
        n_sep1_water: s1.n[0],
        n_sep1_oxygen: s1.n[2],
        u_sep1: s1.u,
        n_sep2_water: s2.n[0],
        n_sep2_hydrogen: s2.n[1],
        u_sep2: s2.u,
        n_tank: tank.n,
        u_tank: tank.u,
    })
}

/// Steady state (at fixed holdup moles) of the inputs in force at `t = 0`.
pub fn initial_steady_state(config: &ScenarioConfig) -> Result<SteadyState> {
    let plant = Plant::new(config.plant.clone())?;
    let schedule = build_schedule(config, &plant)?;
    let x = initial_state(config, &plant)?;
    let (u, d): (Inputs, Disturbances) = schedule.at(0.0);
    Ok(steady_state(&plant, &x, &u, &d, config.solver.newton_tol)?)
}

pub fn prepare(config: &ScenarioConfig) -> Result<PreparedScenario> {
    config.validate()?;
    let plant = Plant::new(config.plant.clone())?;
    let schedule = build_schedule(config, &plant)?;
    let mut x0 = initial_state(config, &plant)?;
    let mut hint: Option<AlgebraicVars> = None;
    if config.initial.steady {
        let (u, d) = schedule.at(0.0);
        let ss = steady_state(&plant, &x0, &u, &d, config.solver.newton_tol)?;
        x0 = ss.state.x;
        hint = Some(ss.state.y);
    }
    let options = SimulationOptions {
        t_end: config.horizon,
        sample_interval: config.output.sample_interval,
        settings: config.solver.clone(),
        initial_hint: hint,
    };
    Ok(PreparedScenario { plant, schedule, x0, options })
}

/// Integrates the scenario without writing anything.
pub fn simulate_scenario(config: &ScenarioConfig) -> Result<(Trajectory, Plant)> {
    let prep = prepare(config)?;
    let traj = simulate(&prep.plant, &prep.x0, &prep.schedule, &prep.options);
    Ok((traj, prep.plant))
}

#[derive(Debug)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub summary: Summary,
    pub csv: PathBuf,
    pub plot_files: Vec<PathBuf>,
}

/// Simulates, then writes `trajectory.csv` and the plot files into `out_dir`.
/// An aborted run still writes the samples it produced; check
/// `trajectory.is_complete()`. A zero-horizon run writes only the header row.
pub fn run(config: &ScenarioConfig, out_dir: &Path) -> Result<RunOutput> {
    let columns = output::select_columns(&config.output.columns)?;
    for c in &config.output.channels {
        find_column(c).ok_or_else(|| ConfigError::UnknownChannel(c.clone()))?;
    }
    let (trajectory, plant) = simulate_scenario(config)?;
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io { path: out_dir.display().to_string(), source })?;
    let csv = out_dir.join("trajectory.csv");
    let rows: &[_] = if config.horizon > 0.0 { &trajectory.samples } else { &[] };
    write_csv_file(&csv, rows, &columns)?;
    let plot_files = emit_plot_data(&trajectory, &config.output.channels, out_dir)?;
    let summary = summarize(&trajectory, plant.thermo());
    Ok(RunOutput { trajectory, summary, csv, plot_files })
}

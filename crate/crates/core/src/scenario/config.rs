//! Scenario files (TOML).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::dae::{PlantParams, SolverSettings};

/// Unit of a signal value in a scenario file. Values are converted to SI
/// (mol/s, W, K) when the schedule is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "mol/s")]
    MolPerSecond,
    #[serde(rename = "kg/s")]
    KgPerSecond,
    W,
    #[serde(rename = "kW")]
    KiloWatt,
    #[serde(rename = "MW")]
    MegaWatt,
    K,
    #[serde(rename = "degC")]
    Celsius,
}

impl Unit {
    pub fn kind(self) -> Quantity {
        match self {
            Unit::MolPerSecond | Unit::KgPerSecond => Quantity::Flow,
            Unit::W | Unit::KiloWatt | Unit::MegaWatt => Quantity::Power,
            Unit::K | Unit::Celsius => Quantity::Temperature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Flow,
    Power,
    Temperature,
}

/// Piecewise-constant schedule: each `[t, value]` holds from `t` until the
/// next breakpoint. The first breakpoint must be at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signal {
    pub unit: Unit,
    pub steps: Vec<(f64, f64)>,
}

impl Signal {
    pub fn constant(unit: Unit, value: f64) -> Self {
        Signal { unit, steps: vec![(0.0, value)] }
    }
}

/// Schedules for every input and disturbance channel. Omitted manipulated
/// inputs are replaced by the balanced values of the design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signals {
    #[serde(rename = "P_in")]
    pub power: Signal,
    #[serde(rename = "T_amb", default = "default_ambient", skip_serializing_if = "is_default_ambient")]
    pub t_amb: Signal,
    #[serde(rename = "T_make_up", default = "default_make_up", skip_serializing_if = "is_default_make_up")]
    pub t_make_up: Signal,
    #[serde(rename = "f_sep1_H2O", default, skip_serializing_if = "Option::is_none")]
    pub f_sep1_water: Option<Signal>,
    #[serde(rename = "f_sep2_H2O", default, skip_serializing_if = "Option::is_none")]
    pub f_sep2_water: Option<Signal>,
    #[serde(rename = "f_make_up", default, skip_serializing_if = "Option::is_none")]
    pub f_make_up: Option<Signal>,
    #[serde(rename = "f_tank_H2", default, skip_serializing_if = "Option::is_none")]
    pub f_tank_out: Option<Signal>,
    #[serde(rename = "Q_HX1", default, skip_serializing_if = "Option::is_none")]
    pub q_hx1: Option<Signal>,
    #[serde(rename = "Q_HX2", default, skip_serializing_if = "Option::is_none")]
    pub q_hx2: Option<Signal>,
    #[serde(rename = "f_sep1_O2", default, skip_serializing_if = "Option::is_none")]
    pub f_sep1_oxygen: Option<Signal>,
    #[serde(rename = "f_sep2_H2", default, skip_serializing_if = "Option::is_none")]
    pub f_sep2_hydrogen: Option<Signal>,
}

fn default_ambient() -> Signal {
    Signal::constant(Unit::Celsius, 25.0)
}

fn default_make_up() -> Signal {
    Signal::constant(Unit::Celsius, 30.0)
}

fn is_default_ambient(s: &Signal) -> bool {
    *s == default_ambient()
}

fn is_default_make_up(s: &Signal) -> bool {
    *s == default_make_up()
}

impl Signals {
    /// Signals with only a power schedule; everything else defaulted.
    pub fn with_power(power: Signal) -> Self {
        Signals {
            power,
            t_amb: default_ambient(),
            t_make_up: default_make_up(),
            f_sep1_water: None,
            f_sep2_water: None,
            f_make_up: None,
            f_tank_out: None,
            q_hx1: None,
            q_hx2: None,
            f_sep1_oxygen: None,
            f_sep2_hydrogen: None,
        }
    }

    /// Manipulated-input schedules in `Inputs` order with their file keys.
    pub fn inputs(&self) -> [(&'static str, Option<&Signal>); 8] {
        [
            ("f_sep1_H2O", self.f_sep1_water.as_ref()),
            ("f_sep2_H2O", self.f_sep2_water.as_ref()),
            ("f_make_up", self.f_make_up.as_ref()),
            ("f_tank_H2", self.f_tank_out.as_ref()),
            ("Q_HX1", self.q_hx1.as_ref()),
            ("Q_HX2", self.q_hx2.as_ref()),
            ("f_sep1_O2", self.f_sep1_oxygen.as_ref()),
            ("f_sep2_H2", self.f_sep2_hydrogen.as_ref()),
        ]
    }

    /// Disturbance schedules in `Disturbances` order with their file keys.
    pub fn disturbances(&self) -> [(&'static str, &Signal); 3] {
        [("T_amb", &self.t_amb), ("P_in", &self.power), ("T_make_up", &self.t_make_up)]
    }
}

/// Initial holdups, given as vessel conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConditions {
    /// K
    pub stack_temperature: f64,
    /// K; both separators.
    pub separator_temperature: f64,
    /// Pa; both separators.
    pub separator_pressure: f64,
    /// Fraction of each separator volume filled with liquid water.
    pub separator_liquid_fraction: f64,
    /// K
    pub tank_temperature: f64,
    /// Pa
    pub tank_pressure: f64,
    /// Replace the temperatures and internal energies by the steady state of
    /// the inputs at `t = 0` (holdup moles are kept).
    pub steady: bool,
}

impl Default for InitialConditions {
    fn default() -> Self {
        InitialConditions {
            stack_temperature: 298.15,
            separator_temperature: 298.15,
            separator_pressure: 101_325.0,
            separator_liquid_fraction: 0.5,
            tank_temperature: 298.15,
            tank_pressure: 2.0e6,
            steady: false,
        }
    }
}

/// Operating point used to fill in omitted manipulated inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignPoint {
    /// K
    pub stack_temperature: f64,
    /// Stack inlet water, mol/s
    pub recirculation: f64,
}

impl Default for DesignPoint {
    fn default() -> Self {
        DesignPoint { stack_temperature: 353.15, recirculation: 500.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// s
    pub sample_interval: f64,
    /// CSV columns after `t_s`; empty means all.
    pub columns: Vec<String>,
    /// Channels written as separate `(t, value)` plot files.
    pub channels: Vec<String>,
    /// Output directory; relative paths resolve against the working directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { sample_interval: 10.0, columns: Vec::new(), channels: Vec::new(), directory: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Simulated horizon, s
    pub horizon: f64,
    #[serde(default)]
    pub plant: PlantParams,
    #[serde(default)]
    pub initial: InitialConditions,
    #[serde(default)]
    pub design: DesignPoint,
    pub signals: Signals,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub output: OutputConfig,
}

fn range(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Range { field: field.into(), message: message.into() }
}

fn validate_signal(key: &str, s: &Signal, expected: Quantity) -> Result<(), ConfigError> {
    let field = format!("signals.{key}");
    if s.unit.kind() != expected {
        return Err(range(&field, format!("{key} needs a {expected:?} unit, got {:?}", s.unit).to_lowercase()));
    }
    let Some(first) = s.steps.first() else {
        return Err(range(&field, format!("{key} needs at least one step")));
    };
    if first.0 != 0.0 {
        return Err(range(&field, format!("{key} must start at t = 0, starts at {}", first.0)));
    }
    for w in s.steps.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(range(&field, format!("{key} breakpoints must be strictly increasing ({} then {})", w[0].0, w[1].0)));
        }
    }
    for &(t, v) in &s.steps {
        if !t.is_finite() || !v.is_finite() {
            return Err(range(&field, format!("{key} has a non-finite entry")));
        }
        let ok = match s.unit {
            Unit::K => v > 0.0,
            Unit::Celsius => v > -273.15,
            _ => v >= 0.0,
        };
        if !ok {
            return Err(range(&field, format!("{key} value {v} is out of range")));
        }
    }
    Ok(())
}

impl ScenarioConfig {
    /// A scenario with only a power schedule and every default applied.
    pub fn minimal(horizon: f64, power: Signal) -> Self {
        ScenarioConfig {
            horizon,
            plant: PlantParams::default(),
            initial: InitialConditions::default(),
            design: DesignPoint::default(),
            signals: Signals::with_power(power),
            solver: SolverSettings::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text).map_err(|e| match e {
            ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), ConfigError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml())
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    /// Type and range checks for every block.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(range("horizon", "horizon must be a non-negative number of seconds"));
        }
        self.plant.validate().map_err(|(f, m)| range(format!("plant.{f}"), m))?;
        self.solver.validate().map_err(|(f, m)| range(format!("solver.{f}"), m))?;

        let ic = &self.initial;
        for (field, v) in [
            ("initial.stack_temperature", ic.stack_temperature),
            ("initial.separator_temperature", ic.separator_temperature),
            ("initial.tank_temperature", ic.tank_temperature),
            ("initial.separator_pressure", ic.separator_pressure),
            ("initial.tank_pressure", ic.tank_pressure),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(range(field, format!("{field} must be positive")));
            }
        }
        if !(ic.separator_liquid_fraction >= 0.0 && ic.separator_liquid_fraction < 1.0) {
            return Err(range("initial.separator_liquid_fraction", "separator_liquid_fraction must lie in [0,1)"));
        }
        if !(self.design.stack_temperature > 0.0) {
            return Err(range("design.stack_temperature", "design stack_temperature must be positive"));
        }
        if !(self.design.recirculation >= 0.0) {
            return Err(range("design.recirculation", "design recirculation must be non-negative"));
        }

        validate_signal("P_in", &self.signals.power, Quantity::Power)?;
        validate_signal("T_amb", &self.signals.t_amb, Quantity::Temperature)?;
        validate_signal("T_make_up", &self.signals.t_make_up, Quantity::Temperature)?;
        for (i, (key, s)) in self.signals.inputs().into_iter().enumerate() {
            let expected = if i == 4 || i == 5 { Quantity::Power } else { Quantity::Flow };
            if let Some(s) = s {
                validate_signal(key, s, expected)?;
            }
        }

        let o = &self.output;
        if !(o.sample_interval > 0.0 && o.sample_interval.is_finite()) {
            return Err(range("output.sample_interval", "sample_interval must be positive"));
        }
        for c in o.columns.iter().chain(&o.channels) {
            if super::output::find_column(c).is_none() {
                return Err(ConfigError::UnknownChannel(c.clone()));
            }
        }
        Ok(())
    }
}

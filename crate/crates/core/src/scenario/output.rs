//! CSV columns, plot files and run summaries.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::ConfigError;
use crate::dae::{Sample, Trajectory};
use crate::error::{Error, Result};
use crate::species::Species;
use crate::thermo::ThermoModel;

/// One output column: `name_unit` in the header.
#[derive(Clone, Copy)]
pub struct Column {
    pub name: &'static str,
    /// Unit suffix; empty for dimensionless columns.
    pub unit: &'static str,
    pub get: fn(&Sample) -> f64,
}

impl Column {
    pub fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.to_string()
        } else {
            format!("{}_{}", self.name, self.unit)
        }
    }
}

impl std::fmt::Debug for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.header())
    }
}

macro_rules! col {
    ($name:expr, $unit:expr, |$s:ident| $body:expr) => {
        Column { name: $name, unit: $unit, get: |$s: &Sample| $body }
    };
}

/// Every available column, in CSV order (after `t_s`).
pub const COLUMNS: &[Column] = &[
    col!("T", "K", |s| s.state.x.t_stack),
    col!("xi_cell", "V", |s| s.state.y.voltage),
    col!("I", "A", |s| s.state.y.current),
    col!("z_H2", "mol_s", |s| s.outputs.hydrogen_production),
    col!("P_in", "W", |s| s.d.power),
    col!("T_HX1", "K", |s| s.state.y.t_hx1),
    col!("T_HX2", "K", |s| s.state.y.t_hx2),
    col!("T_in", "K", |s| s.state.y.t_in),
    col!("n_sep1_H2O", "mol", |s| s.state.x.n_sep1_water),
    col!("n_sep1_O2", "mol", |s| s.state.x.n_sep1_oxygen),
    col!("U_sep1", "J", |s| s.state.x.u_sep1),
    col!("n_sep2_H2O", "mol", |s| s.state.x.n_sep2_water),
    col!("n_sep2_H2", "mol", |s| s.state.x.n_sep2_hydrogen),
    col!("U_sep2", "J", |s| s.state.x.u_sep2),
    col!("n_tank", "mol", |s| s.state.x.n_tank),
    col!("U_tank", "J", |s| s.state.x.u_tank),
    col!("T_sep1", "K", |s| s.state.y.t_sep1),
    col!("P_sep1", "Pa", |s| s.state.y.p_sep1),
    col!("T_sep2", "K", |s| s.state.y.t_sep2),
    col!("P_sep2", "Pa", |s| s.state.y.p_sep2),
    col!("T_comp1", "K", |s| s.state.y.t_comp1),
    col!("T_comp2", "K", |s| s.state.y.t_comp2),
    col!("T_comp3", "K", |s| s.state.y.t_comp3),
    col!("T_tank", "K", |s| s.state.y.t_tank),
    col!("P_tank", "Pa", |s| s.state.y.p_tank),
    col!("f_in_H2O", "mol_s", |s| s.state.y.f_in),
    col!("f_sep1_H2O", "mol_s", |s| s.u.f_sep1_water),
    col!("f_sep2_H2O", "mol_s", |s| s.u.f_sep2_water),
    col!("f_make_up", "mol_s", |s| s.u.f_make_up),
    col!("f_tank_H2", "mol_s", |s| s.u.f_tank_out),
    col!("Q_HX1", "W", |s| s.u.q_hx1),
    col!("Q_HX2", "W", |s| s.u.q_hx2),
    col!("f_sep1_O2", "mol_s", |s| s.u.f_sep1_oxygen),
    col!("f_sep2_H2", "mol_s", |s| s.u.f_sep2_hydrogen),
    col!("T_amb", "K", |s| s.d.t_amb),
    col!("T_make_up", "K", |s| s.d.t_make_up),
    col!("f_O2_out", "mol_s", |s| s.outputs.oxygen_production),
    col!("eta_F", "", |s| s.outputs.faraday_efficiency),
    col!("W_comp1", "W", |s| s.outputs.compressor_work[0]),
    col!("W_comp2", "W", |s| s.outputs.compressor_work[1]),
    col!("W_comp3", "W", |s| s.outputs.compressor_work[2]),
    col!("W_comp", "W", |s| s.outputs.total_compressor_work()),
    col!("W_hex1", "W", |s| s.outputs.cooler_duty[0]),
    col!("W_hex2", "W", |s| s.outputs.cooler_duty[1]),
    col!("W_hex3", "W", |s| s.outputs.cooler_duty[2]),
    col!("Q_amb", "W", |s| s.outputs.stack.ambient_loss),
];

/// Looks a column up by header (`T_K`) or by bare name (`T`).
pub fn find_column(key: &str) -> Option<&'static Column> {
    COLUMNS.iter().find(|c| c.header() == key).or_else(|| COLUMNS.iter().find(|c| c.name == key))
}

/// Resolves a column selection; empty means all columns.
pub fn select_columns(keys: &[String]) -> std::result::Result<Vec<&'static Column>, ConfigError> {
    if keys.is_empty() {
        return Ok(COLUMNS.iter().collect());
    }
    keys.iter().map(|k| find_column(k).ok_or_else(|| ConfigError::UnknownChannel(k.clone()))).collect()
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

/// Writes `t_s` plus `columns` for each sample.
pub fn write_csv(out: impl Write, samples: &[Sample], columns: &[&Column]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("t_s".to_string()).chain(columns.iter().map(|c| c.header())).collect();
    w.write_record(&header)?;
    for s in samples {
        let row: Vec<String> =
            std::iter::once(s.t).chain(columns.iter().map(|c| (c.get)(s))).map(|v| v.to_string()).collect();
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_csv_file(path: &Path, samples: &[Sample], columns: &[&Column]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    write_csv(std::io::BufWriter::new(file), samples, columns)
}

/// One `t_s,<channel>` CSV per channel in `dir`. All names are checked
/// before anything is written.
pub fn emit_plot_data(trajectory: &Trajectory, channels: &[String], dir: &Path) -> Result<Vec<PathBuf>> {
    let cols = channels
        .iter()
        .map(|k| find_column(k).ok_or_else(|| ConfigError::UnknownChannel(k.clone())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut paths = Vec::with_capacity(cols.len());
    for c in cols {
        let path = dir.join(format!("plot_{}.csv", c.header()));
        write_csv_file(&path, &trajectory.samples, &[c])?;
        paths.push(path);
    }
    Ok(paths)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    /// Time of the last sample, s
    pub t_final: f64,
    pub samples: usize,
    pub complete: bool,
    /// K
    pub final_stack_temperature: f64,
    /// kg
    pub hydrogen_produced: f64,
    /// kWh
    pub electrical_energy: f64,
    /// kWh/kg; `None` when no hydrogen was produced.
    pub specific_energy: Option<f64>,
    /// V
    pub peak_cell_voltage: f64,
}

/// Totals over the sampled trajectory. Electrical energy uses the
/// piecewise-constant power exactly (left values); hydrogen uses the
/// trapezoidal rule, taking the value just before any input jump at the
/// right end of an interval.
pub fn summarize(trajectory: &Trajectory, thermo: &ThermoModel) -> Summary {
    let s = &trajectory.samples;
    let mut moles = 0.0;
    let mut energy = 0.0;
    for w in s.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        energy += a.d.power * dt;
        let z_right = trajectory
            .events
            .iter()
            .find(|e| e.t == b.t)
            .map_or(b.outputs.hydrogen_production, |e| e.z_before);
        moles += 0.5 * (a.outputs.hydrogen_production + z_right) * dt;
    }
    let kg = moles * thermo.molar_mass(Species::Hydrogen);
    let kwh = energy / 3.6e6;
    Summary {
        t_final: s.last().map_or(0.0, |x| x.t),
        samples: s.len(),
        complete: trajectory.is_complete(),
        final_stack_temperature: s.last().map_or(f64::NAN, |x| x.state.x.t_stack),
        hydrogen_produced: kg,
        electrical_energy: kwh,
        specific_energy: (kg > 0.0).then(|| kwh / kg),
        peak_cell_voltage: s.iter().map(|x| x.state.y.voltage).fold(f64::NEG_INFINITY, f64::max),
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.complete { "completed" } else { "aborted" };
        writeln!(f, "run {status} at t = {} s ({} samples)", self.t_final, self.samples)?;
        if self.samples == 0 {
            return write!(f, "no samples recorded");
        }
        writeln!(f, "final stack temperature: {:.3} K", self.final_stack_temperature)?;
        writeln!(f, "hydrogen produced:       {:.6} kg", self.hydrogen_produced)?;
        writeln!(f, "electrical energy:       {:.6} kWh", self.electrical_energy)?;
        match self.specific_energy {
            Some(e) => writeln!(f, "specific energy:         {e:.4} kWh/kg")?,
            None => writeln!(f, "specific energy:         n/a (no hydrogen produced)")?,
        }
        write!(f, "peak cell voltage:       {:.5} V", self.peak_cell_voltage)
    }
}

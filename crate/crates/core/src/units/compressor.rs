//! Multistage isentropic hydrogen compressor with intercoolers.
//!
//! Each stage keeps the entropy flow constant between inlet and outlet. The
//! shaft work is the isentropic enthalpy rise divided by the efficiency.
//! Between stages the gas is cooled back to a set temperature (by default the
//! first-stage inlet temperature); the last cooler brings it to tank
//! temperature.
//!
//! The outlet state follows `H_out = H_in + eta * W`, which makes the actual
//! outlet temperature coincide with the isentropic one; the extra
//! `(1 - eta) * W` is counted as work but not as outlet enthalpy.

use serde::{Deserialize, Serialize};

use super::UnitError;
use crate::numeric::brent;
use crate::species::{Species, SpeciesVec};
use crate::thermo::{Phase, ThermoModel};

const H2: Species = Species::Hydrogen;

fn h2_flow(flow: f64) -> SpeciesVec {
    crate::species::pure(H2, flow)
}

/// Compressor train configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompressorTrain {
    pub stages: usize,
    /// Isentropic efficiency in (0, 1].
    pub efficiency: f64,
    /// Outlet temperatures (K) of the coolers between stages, one per
    /// intermediate cooler. Empty means "back to the first-stage inlet".
    pub intercooler_temperatures: Vec<f64>,
}

impl Default for CompressorTrain {
    fn default() -> Self {
        CompressorTrain { stages: 3, efficiency: 0.75, intercooler_temperatures: Vec::new() }
    }
}

impl CompressorTrain {
    pub fn validate(&self) -> Result<(), (&'static str, &'static str)> {
        if self.stages < 1 {
            return Err(("stages", "stages must be at least 1"));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(("efficiency", "efficiency must lie in (0,1]"));
        }
        if !self.intercooler_temperatures.is_empty() && self.intercooler_temperatures.len() != self.stages - 1 {
            return Err(("intercooler_temperatures", "intercooler_temperatures needs one entry per intermediate cooler"));
        }
        if self.intercooler_temperatures.iter().any(|t| !(*t > 0.0)) {
            return Err(("intercooler_temperatures", "intercooler temperatures must be positive"));
        }
        Ok(())
    }

    /// Inlet temperature of stage `k` (0-based) when the first stage takes gas at `t_first`.
    pub fn stage_inlet_temperature(&self, k: usize, t_first: f64) -> f64 {
        if k == 0 || self.intercooler_temperatures.is_empty() {
            t_first
        } else {
            self.intercooler_temperatures[k - 1]
        }
    }

    /// Equal per-stage ratio `(p_out / p_in)^(1/k)`.
    pub fn stage_ratio(&self, p_in: f64, p_out: f64) -> f64 {
        (p_out / p_in).powf(1.0 / self.stages as f64)
    }

    /// Outlet pressure of each stage; the last is exactly `p_out`.
    pub fn stage_pressures(&self, p_in: f64, p_out: f64) -> Vec<f64> {
        let ratio = self.stage_ratio(p_in, p_out);
        let mut pressures: Vec<f64> = (1..=self.stages).map(|k| p_in * ratio.powi(k as i32)).collect();
        *pressures.last_mut().expect("at least one stage") = p_out;
        pressures
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRecord {
    pub t_in: f64,
    pub p_in: f64,
    pub p_out: f64,
    pub t_out_isentropic: f64,
    pub t_out_actual: f64,
    /// Shaft work, W
    pub work: f64,
}

/// Molar entropy change across a stage, J/mol/K. Zero on the isentrope.
pub fn stage_entropy_residual(thermo: &ThermoModel, t_in: f64, p_in: f64, t_out: f64, p_out: f64) -> Result<f64, UnitError> {
    Ok(thermo.molar_entropy(H2, Phase::Gas, t_out, p_out)? - thermo.molar_entropy(H2, Phase::Gas, t_in, p_in)?)
}

/// Isentropic outlet temperature from `(t_in, p_in)` to `p_out`.
pub fn isentropic_temperature(thermo: &ThermoModel, t_in: f64, p_in: f64, p_out: f64) -> Result<f64, UnitError> {
    if p_out == p_in {
        return Ok(t_in);
    }
    let pc = &thermo.table().species(H2).gas;
    let [lo, hi] = pc.cp_valid_range;
    let (a, b) = if p_out > p_in { (t_in, hi) } else { (lo, t_in) };
    brent(|t| stage_entropy_residual(thermo, t_in, p_in, t, p_out), a, b, 1e-12, 200)
        .map_err(|e| UnitError::Convergence(format!("isentropic outlet temperature: {e}")))
}

pub fn compressor_stage(
    thermo: &ThermoModel,
    t_in: f64,
    p_in: f64,
    p_out: f64,
    flow: f64,
    efficiency: f64,
) -> Result<StageRecord, UnitError> {
    if !(p_in > 0.0 && p_out >= p_in) {
        return Err(UnitError::Precondition(format!("stage needs p_out >= p_in > 0 (p_in = {p_in}, p_out = {p_out})")));
    }
    if !(flow >= 0.0) {
        return Err(UnitError::Precondition(format!("negative compressor flow {flow}")));
    }
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(UnitError::Precondition(format!("efficiency {efficiency} outside (0,1]")));
    }
    if flow == 0.0 {
        return Ok(StageRecord { t_in, p_in, p_out, t_out_isentropic: t_in, t_out_actual: t_in, work: 0.0 });
    }
    let f = h2_flow(flow);
    let t_is = isentropic_temperature(thermo, t_in, p_in, p_out)?;
    let h_in = thermo.enthalpy_flow(t_in, p_in, &f, Phase::Gas)?;
    let h_is = thermo.enthalpy_flow(t_is, p_out, &f, Phase::Gas)?;
    let work = (h_is - h_in) / efficiency;
    let target = h_in + efficiency * work;
    let t_out_actual = if t_is == t_in {
        t_in
    } else {
        let [lo, hi] = thermo.table().species(H2).gas.cp_valid_range;
        brent(|t| thermo.enthalpy_flow(t, p_out, &f, Phase::Gas).map(|h| h - target), lo, hi, 1e-12, 200)
            .map_err(|e| UnitError::Convergence(format!("stage outlet temperature: {e}")))?
    };
    Ok(StageRecord { t_in, p_in, p_out, t_out_isentropic: t_is, t_out_actual, work })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub stages: Vec<StageRecord>,
    /// W
    pub total_work: f64,
    /// Cooler duties `H_next_in - H_out` after each stage, W (negative when removing heat).
    pub cooler_duties: Vec<f64>,
}

/// Compresses `flow` mol/s of H2 from `(t_in, p_in)` to the tank at `(t_tank, p_tank)`.
pub fn compressor_train(
    thermo: &ThermoModel,
    t_in: f64,
    p_in: f64,
    p_tank: f64,
    t_tank: f64,
    flow: f64,
    train: &CompressorTrain,
) -> Result<TrainResult, UnitError> {
    train.validate().map_err(|(_, msg)| UnitError::Precondition(msg.into()))?;
    if !(p_tank >= p_in) {
        return Err(UnitError::Precondition(format!("tank pressure {p_tank} Pa below compressor inlet {p_in} Pa")));
    }
    let f = h2_flow(flow);
    let outlets = train.stage_pressures(p_in, p_tank);
    let mut stages = Vec::with_capacity(train.stages);
    let mut cooler_duties = Vec::with_capacity(train.stages);
    let mut p_stage_in = p_in;
    for (k, &p_out) in outlets.iter().enumerate() {
        let t_stage_in = train.stage_inlet_temperature(k, t_in);
        let rec = compressor_stage(thermo, t_stage_in, p_stage_in, p_out, flow, train.efficiency)?;
        let h_out = thermo.enthalpy_flow(rec.t_out_actual, p_out, &f, Phase::Gas)?;
        let t_next = if k + 1 < train.stages { train.stage_inlet_temperature(k + 1, t_in) } else { t_tank };
        let h_next = thermo.enthalpy_flow(t_next, p_out, &f, Phase::Gas)?;
        cooler_duties.push(h_next - h_out);
        stages.push(rec);
        p_stage_in = p_out;
    }
    let total_work = stages.iter().map(|s| s.work).sum();
    Ok(TrainResult { stages, total_work, cooler_duties })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::GAS_CONSTANT;

    fn th() -> &'static ThermoModel {
        ThermoModel::standard()
    }

    #[test]
    fn equal_pressures_do_nothing() {
        let r = compressor_stage(th(), 300.0, 1e5, 1e5, 1.0, 0.75).unwrap();
        assert_eq!(r.t_out_isentropic, 300.0);
        assert_eq!(r.work, 0.0);
    }

    #[test]
    fn zero_flow_short_circuits() {
        let r = compressor_stage(th(), 300.0, 1e5, 4e5, 0.0, 0.75).unwrap();
        assert_eq!((r.t_out_isentropic, r.t_out_actual, r.work), (300.0, 300.0, 0.0));
    }

    #[test]
    fn isentrope_close_to_constant_cp_estimate() {
        let r = compressor_stage(th(), 300.0, 1e5, 4e5, 1.0, 0.75).unwrap();
        let oracle = 300.0 * 4f64.powf(GAS_CONSTANT / 28.8);
        assert!((r.t_out_isentropic - oracle).abs() / oracle < 0.02, "{} vs {oracle}", r.t_out_isentropic);
        assert!((r.t_out_isentropic - 445.0).abs() / 445.0 < 0.02);
        // actual outlet equals isentropic outlet under H_out = H_in + eta W
        assert!((r.t_out_actual - r.t_out_isentropic).abs() < 1e-9);
    }

    #[test]
    fn stage_entropy_flow_is_conserved() {
        let r = compressor_stage(th(), 310.0, 1.2e5, 7e5, 2.5, 0.8).unwrap();
        let f = h2_flow(2.5);
        let s_in = th().entropy_flow(310.0, 1.2e5, &f, Phase::Gas).unwrap();
        let s_out = th().entropy_flow(r.t_out_isentropic, 7e5, &f, Phase::Gas).unwrap();
        assert!((s_out - s_in).abs() < 1e-9, "{}", s_out - s_in);
    }

    #[test]
    fn idle_train_only_cools_to_tank() {
        let train = CompressorTrain::default();
        let r = compressor_train(th(), 330.0, 1e5, 1e5, 300.0, 1.0, &train).unwrap();
        assert_eq!(r.total_work, 0.0);
        assert_eq!(r.cooler_duties[0], 0.0);
        assert_eq!(r.cooler_duties[1], 0.0);
        let expected = th().enthalpy_flow(300.0, 1e5, &h2_flow(1.0), Phase::Gas).unwrap()
            - th().enthalpy_flow(330.0, 1e5, &h2_flow(1.0), Phase::Gas).unwrap();
        assert_eq!(r.cooler_duties[2], expected);
    }

    #[test]
    fn equal_stages_have_equal_outlets() {
        let train = CompressorTrain::default();
        let r = compressor_train(th(), 300.0, 1e5, 2e7, 300.0, 1.0, &train).unwrap();
        let t0 = r.stages[0].t_out_isentropic;
        for s in &r.stages {
            assert!((s.t_out_isentropic - t0).abs() < 1e-8);
        }
        assert!(r.cooler_duties.iter().all(|d| *d < 0.0));
        assert_eq!(r.stages[2].p_out, 2e7);
    }

    #[test]
    fn invalid_train_is_rejected() {
        let bad = CompressorTrain { efficiency: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = CompressorTrain { intercooler_temperatures: vec![300.0], ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(compressor_train(th(), 300.0, 2e5, 1e5, 300.0, 1.0, &CompressorTrain::default()).is_err());
    }

    #[test]
    fn explicit_intercooler_setpoints() {
        let train = CompressorTrain { intercooler_temperatures: vec![310.0, 320.0], ..Default::default() };
        let r = compressor_train(th(), 300.0, 1e5, 1e7, 300.0, 1.0, &train).unwrap();
        assert_eq!(r.stages[1].t_in, 310.0);
        assert_eq!(r.stages[2].t_in, 320.0);
    }
}

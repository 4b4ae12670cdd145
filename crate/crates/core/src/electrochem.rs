//! Electrochemistry of the alkaline stack.
//!
//! Cell voltage is the reversible voltage plus ohmic and activation
//! overvoltages (empirical Ulleberg-type fit); mass-transfer overvoltage is
//! not modelled. The empirical coefficients are fitted with the stack
//! temperature in degrees Celsius and current density in A/m^2, except for the
//! Faraday efficiency whose `f1` is in (mA/cm^2)^2. All conversions happen in
//! this module; callers pass Kelvin and amperes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::species::Species;
use crate::thermo::{Phase, ThermoError, ThermoModel};

/// C/mol
pub const FARADAY: f64 = 96_485.33;
/// Electrons transferred per H2 molecule.
pub const ELECTRONS: f64 = 2.0;
pub const KELVIN_OFFSET: f64 = 273.15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElectroError {
    #[error("activation overvoltage undefined at {t_c} degC, I = {current} A (log argument {argument})")]
    ActivationDomain { t_c: f64, current: f64, argument: f64 },
    #[error("no operating point for P_in = {power} W: {reason}")]
    NoOperatingPoint { power: f64, reason: String },
    #[error(transparent)]
    Thermo(#[from] ThermoError),
}

/// Logarithm used in the activation term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    /// The base the tabulated `s, t1..t3` were fitted in.
    #[default]
    Ten,
    Natural,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Ten => x.log10(),
            LogBase::Natural => x.ln(),
        }
    }

    pub fn dlog(self, x: f64) -> f64 {
        match self {
            LogBase::Ten => 1.0 / (x * std::f64::consts::LN_10),
            LogBase::Natural => 1.0 / x,
        }
    }
}

/// Electrochemical and thermal parameters of the stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StackParams {
    /// Ohm m^2
    pub r1: f64,
    /// Ohm m^2 / degC
    pub r2: f64,
    /// V
    pub s: f64,
    /// m^2 / A
    pub t1: f64,
    /// m^2 degC / A
    pub t2: f64,
    /// m^2 degC^2 / A
    pub t3: f64,
    /// (mA/cm^2)^2
    pub f1: f64,
    pub f2: f64,
    /// Electrode area of one cell, m^2.
    pub area: f64,
    /// Cells in series.
    pub cells: u32,
    /// Lumped heat capacity of stack, electrolyte and metal, J/K.
    pub heat_capacity: f64,
    /// Area for heat loss to ambient, m^2.
    pub heat_transfer_area: f64,
    /// W/m^2/K
    pub heat_transfer_coefficient: f64,
    pub log_base: LogBase,
}

impl Default for StackParams {
    fn default() -> Self {
        StackParams {
            r1: 2.18e-4,
            r2: -4.25e-7,
            s: 117.93e-3,
            t1: -145.29e-3,
            t2: 11.794,
            t3: 395.68,
            f1: 120.0,
            f2: 0.98,
            area: 1.25,
            cells: 230,
            heat_capacity: 5.0e6,
            heat_transfer_area: 10.0,
            heat_transfer_coefficient: 50.0,
            log_base: LogBase::Ten,
        }
    }
}

impl StackParams {
    /// Range checks; returns the offending field and the constraint.
    pub fn validate(&self) -> Result<(), (&'static str, &'static str)> {
        let checks: [(bool, &str, &str); 7] = [
            (self.area > 0.0, "area", "area must be positive"),
            (self.cells >= 1, "cells", "cells must be at least 1"),
            (self.f1 > 0.0, "f1", "f1 must be positive"),
            (self.f2 > 0.0 && self.f2 <= 1.0, "f2", "f2 must lie in (0,1]"),
            (self.heat_capacity > 0.0, "heat_capacity", "heat_capacity must be positive"),
            (self.heat_transfer_area >= 0.0, "heat_transfer_area", "heat_transfer_area must be non-negative"),
            (
                self.heat_transfer_coefficient >= 0.0,
                "heat_transfer_coefficient",
                "heat_transfer_coefficient must be non-negative",
            ),
        ];
        for (ok, field, msg) in checks {
            if !ok {
                return Err((field, msg));
            }
        }
        Ok(())
    }

    pub fn cells_f64(&self) -> f64 {
        f64::from(self.cells)
    }

    /// `A_s * h_c`, W/K
    pub fn ambient_conductance(&self) -> f64 {
        self.heat_transfer_area * self.heat_transfer_coefficient
    }
}

pub fn kelvin_to_celsius(t: f64) -> f64 {
    t - KELVIN_OFFSET
}

/// A/m^2
pub fn current_density(current: f64, p: &StackParams) -> f64 {
    current / p.area
}

/// 1 A/m^2 = 0.1 mA/cm^2
pub fn a_per_m2_to_ma_per_cm2(j: f64) -> f64 {
    0.1 * j
}

/// Reaction enthalpy, entropy and Gibbs energy per mole of H2 for
/// H2O(l) -> H2(g) + 1/2 O2(g), with both gases pure at pressure `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionThermo {
    /// J/mol
    pub dh: f64,
    /// J/mol/K
    pub ds: f64,
    /// J/mol
    pub dg: f64,
}

pub fn reaction_thermo(thermo: &ThermoModel, t: f64, p: f64) -> Result<ReactionThermo, ThermoError> {
    let h = |sp, ph| thermo.molar_enthalpy(sp, ph, t, p);
    let s = |sp, ph| thermo.molar_entropy(sp, ph, t, p);
    let dh = h(Species::Hydrogen, Phase::Gas)? + 0.5 * h(Species::Oxygen, Phase::Gas)?
        - h(Species::Water, Phase::Liquid)?;
    let ds = s(Species::Hydrogen, Phase::Gas)? + 0.5 * s(Species::Oxygen, Phase::Gas)?
        - s(Species::Water, Phase::Liquid)?;
    Ok(ReactionThermo { dh, ds, dg: dh - t * ds })
}

/// `dG_r / (z_e F)`, V
pub fn reversible_voltage(thermo: &ThermoModel, t: f64, p: f64) -> Result<f64, ThermoError> {
    Ok(reaction_thermo(thermo, t, p)?.dg / (ELECTRONS * FARADAY))
}

/// `(r1 + r2 T) I/A`, with `t_c` in degC.
pub fn ohmic_overvoltage(current: f64, t_c: f64, p: &StackParams) -> f64 {
    (p.r1 + p.r2 * t_c) * current_density(current, p)
}

fn activation_coefficient(t_c: f64, p: &StackParams) -> f64 {
    p.t1 + p.t2 / t_c + p.t3 / (t_c * t_c)
}

/// `s log((t1 + t2/T + t3/T^2) I/A + 1)`, with `t_c` in degC.
pub fn activation_overvoltage(current: f64, t_c: f64, p: &StackParams) -> Result<f64, ElectroError> {
    let arg = activation_coefficient(t_c, p) * current_density(current, p) + 1.0;
    if !(arg > 0.0) {
        return Err(ElectroError::ActivationDomain { t_c, current, argument: arg });
    }
    Ok(p.s * p.log_base.log(arg))
}

/// Faraday efficiency from a current density in mA/cm^2.
pub fn faraday_efficiency_from_density(j_ma_cm2: f64, p: &StackParams) -> f64 {
    let j2 = j_ma_cm2 * j_ma_cm2;
    j2 / (p.f1 + j2) * p.f2
}

pub fn faraday_efficiency(current: f64, p: &StackParams) -> f64 {
    faraday_efficiency_from_density(a_per_m2_to_ma_per_cm2(current_density(current, p)), p)
}

/// Hydrogen production, mol/s: `n_c eta_F I / (z_e F)`.
pub fn reaction_rate(current: f64, p: &StackParams) -> f64 {
    p.cells_f64() * faraday_efficiency(current, p) * current / (ELECTRONS * FARADAY)
}

/// Reversible voltage plus overvoltages at stack temperature `t` (K).
pub fn cell_voltage(thermo: &ThermoModel, current: f64, t: f64, pressure: f64, p: &StackParams) -> Result<f64, ElectroError> {
    let t_c = kelvin_to_celsius(t);
    Ok(reversible_voltage(thermo, t, pressure)?
        + ohmic_overvoltage(current, t_c, p)
        + activation_overvoltage(current, t_c, p)?)
}

/// Electrical state of the stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectroState {
    /// Cell voltage, V
    pub voltage: f64,
    /// A
    pub current: f64,
    /// W
    pub power: f64,
    /// K
    pub t: f64,
}

/// `[xi_cell - xi_rev - xi_ohm - xi_act, P_in - n_c xi_cell I]`
pub fn electro_residual(
    thermo: &ThermoModel,
    es: &ElectroState,
    pressure: f64,
    p: &StackParams,
) -> Result<[f64; 2], ElectroError> {
    let polarization = cell_voltage(thermo, es.current, es.t, pressure, p)?;
    Ok([es.voltage - polarization, es.power - p.cells_f64() * es.voltage * es.current])
}

/// Upper bound on the current for power `power`: the cell voltage never
/// drops below the reversible voltage.
fn current_ceiling(thermo: &ThermoModel, power: f64, t: f64, pressure: f64, p: &StackParams) -> Result<f64, ElectroError> {
    let rev = reversible_voltage(thermo, t, pressure)?;
    if !(rev > 0.0) {
        return Err(ElectroError::NoOperatingPoint { power, reason: format!("reversible voltage {rev} V is not positive") });
    }
    Ok(power / (p.cells_f64() * rev))
}

fn power_mismatch(thermo: &ThermoModel, current: f64, power: f64, t: f64, pressure: f64, p: &StackParams) -> Result<f64, ElectroError> {
    Ok(p.cells_f64() * cell_voltage(thermo, current, t, pressure, p)? * current - power)
}

/// Operating point by bisection on the current. Robust, used for seeding.
pub fn operating_point_bisection(
    thermo: &ThermoModel,
    power: f64,
    t: f64,
    pressure: f64,
    p: &StackParams,
) -> Result<ElectroState, ElectroError> {
    if power < 0.0 {
        return Err(ElectroError::NoOperatingPoint { power, reason: "negative power".into() });
    }
    if power == 0.0 {
        let voltage = cell_voltage(thermo, 0.0, t, pressure, p)?;
        return Ok(ElectroState { voltage, current: 0.0, power, t });
    }
    let hi = current_ceiling(thermo, power, t, pressure, p)?;
    let current = crate::numeric::bisect(|i| power_mismatch(thermo, i, power, t, pressure, p), 0.0, hi, 0.0, 200)
        .map_err(|e| ElectroError::NoOperatingPoint { power, reason: e.to_string() })?;
    let voltage = cell_voltage(thermo, current, t, pressure, p)?;
    Ok(ElectroState { voltage, current, power, t })
}

/// Operating point `(xi_cell, I)` consistent with `power` at stack temperature
/// `t`, by Newton on the current with a bisection safeguard.
pub fn solve_operating_point(
    thermo: &ThermoModel,
    power: f64,
    t: f64,
    pressure: f64,
    p: &StackParams,
) -> Result<ElectroState, ElectroError> {
    if power <= 0.0 {
        return operating_point_bisection(thermo, power, t, pressure, p);
    }
    let t_c = kelvin_to_celsius(t);
    let rev = reversible_voltage(thermo, t, pressure)?;
    let nc = p.cells_f64();
    let (mut lo, mut hi) = (0.0, current_ceiling(thermo, power, t, pressure, p)?);
    let mut current = 0.5 * hi;
    for _ in 0..100 {
        let j = current_density(current, p);
        let k = activation_coefficient(t_c, p);
        let arg = k * j + 1.0;
        if !(arg > 0.0) {
            return Err(ElectroError::ActivationDomain { t_c, current, argument: arg });
        }
        let voltage = rev + ohmic_overvoltage(current, t_c, p) + p.s * p.log_base.log(arg);
        let mismatch = nc * voltage * current - power;
        if mismatch.abs() <= 1e-13 * power {
            return Ok(ElectroState { voltage, current, power, t });
        }
        if mismatch > 0.0 {
            hi = current;
        } else {
            lo = current;
        }
        let dvoltage = ((p.r1 + p.r2 * t_c) + p.s * p.log_base.dlog(arg) * k) / p.area;
        let slope = nc * (voltage + current * dvoltage);
        let next = current - mismatch / slope;
        let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if (next - current).abs() <= 4.0 * f64::EPSILON * current {
            return Ok(ElectroState { voltage, current, power, t });
        }
        current = next;
    }
    Err(ElectroError::NoOperatingPoint { power, reason: "Newton on the current did not converge".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const T0: f64 = 298.15;
    const P0: f64 = 1e5;

    fn th() -> &'static ThermoModel {
        ThermoModel::standard()
    }

    #[test]
    fn standard_reaction_values() {
        let r = reaction_thermo(th(), T0, P0).unwrap();
        // formation data in the shipped table: -285.83 kJ/mol, Gibbs -237.14 kJ/mol
        assert!((r.dh - 285.8e3).abs() < 1e3, "{}", r.dh);
        assert!((r.dg - 237.1e3).abs() < 1e3, "{}", r.dg);
        assert_eq!(r.dg - (r.dh - T0 * r.ds), 0.0);
    }

    #[test]
    fn gibbs_energy_of_reaction_falls_with_temperature() {
        let mut last = f64::INFINITY;
        for k in 0..=130 {
            let t = 298.0 + 0.5 * k as f64;
            let dg = reaction_thermo(th(), t, P0).unwrap().dg;
            assert!(dg < last);
            last = dg;
        }
    }

    #[test]
    fn reversible_voltage_at_standard_state() {
        let v = reversible_voltage(th(), T0, P0).unwrap();
        assert!((v - 237.1e3 / (2.0 * FARADAY)).abs() < 0.01);
        assert!((v - 1.229).abs() < 0.01);
        assert_eq!(v.to_bits(), reversible_voltage(th(), T0, P0).unwrap().to_bits());
    }

    #[test]
    fn reversible_voltage_decreases_with_temperature() {
        for k in 0..65 {
            let t = 298.0 + k as f64;
            let a = reversible_voltage(th(), t, P0).unwrap();
            let b = reversible_voltage(th(), t + 1.0, P0).unwrap();
            assert!(b < a);
        }
    }

    #[test]
    fn ohmic_overvoltage_values() {
        let p = StackParams::default();
        assert_eq!(ohmic_overvoltage(0.0, 80.0, &p), 0.0);
        let i = 2000.0 * p.area;
        let v = ohmic_overvoltage(i, 80.0, &p);
        assert!((v - 0.3680).abs() < 1e-4, "{v}");
        assert_relative_eq!(ohmic_overvoltage(2.0 * i, 80.0, &p), 2.0 * v, max_relative = 1e-15);
    }

    #[test]
    fn activation_overvoltage_values() {
        let p = StackParams::default();
        assert_eq!(activation_overvoltage(0.0, 80.0, &p).unwrap(), 0.0);
        let i = 2000.0 * p.area;
        let oracle = 0.11793 * ((-0.14529 + 11.794 / 80.0 + 395.68 / 6400.0) * 2000.0 + 1.0f64).log10();
        let v = activation_overvoltage(i, 80.0, &p).unwrap();
        assert_relative_eq!(v, oracle, max_relative = 1e-12);
        let natural = StackParams { log_base: LogBase::Natural, ..p.clone() };
        assert_relative_eq!(
            activation_overvoltage(i, 80.0, &natural).unwrap(),
            v * std::f64::consts::LN_10,
            max_relative = 1e-12
        );
    }

    #[test]
    fn activation_domain_error_names_the_point() {
        let p = StackParams::default();
        // above ~107 degC the coefficient turns negative
        let err = activation_overvoltage(1e5, 150.0, &p).unwrap_err();
        match err {
            ElectroError::ActivationDomain { t_c, current, .. } => {
                assert_eq!(t_c, 150.0);
                assert_eq!(current, 1e5);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn faraday_efficiency_anchors() {
        let p = StackParams::default();
        assert_eq!(faraday_efficiency(0.0, &p), 0.0);
        let half = faraday_efficiency_from_density(120f64.sqrt(), &p);
        assert!((half - 0.49).abs() <= 2.0 * f64::EPSILON, "{half}");
        let high = faraday_efficiency_from_density(1e4, &p);
        assert!((high - 0.98).abs() < 1e-4 && high < 0.98);
    }

    #[test]
    fn reaction_rate_values() {
        let p = StackParams::default();
        assert_eq!(reaction_rate(0.0, &p), 0.0);
        let unit = StackParams { cells: 1, f2: 1.0, f1: 1e-300, ..p.clone() };
        assert_relative_eq!(reaction_rate(2.0 * FARADAY, &unit), 1.0, max_relative = 1e-12);

        // n_c = 230, A = 1.25 m^2, I = 2500 A -> 2000 A/m^2 = 200 mA/cm^2
        let eta = 200.0 * 200.0 / (120.0 + 200.0 * 200.0) * 0.98;
        let oracle = 230.0 * eta * 2500.0 / (2.0 * 96485.33);
        assert_relative_eq!(reaction_rate(2500.0, &p), oracle, max_relative = 1e-14);
    }

    #[test]
    fn open_circuit_residual_is_zero() {
        let p = StackParams::default();
        let t = 350.0;
        let rev = reversible_voltage(th(), t, P0).unwrap();
        let es = ElectroState { voltage: rev, current: 0.0, power: 0.0, t };
        assert_eq!(electro_residual(th(), &es, P0, &p).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn residual_is_linear_in_cell_voltage() {
        let p = StackParams::default();
        let es = ElectroState { voltage: 1.9, current: 3000.0, power: 1e6, t: 350.0 };
        let delta = 1e-3;
        let r0 = electro_residual(th(), &es, P0, &p).unwrap();
        let r1 = electro_residual(th(), &ElectroState { voltage: es.voltage + delta, ..es }, P0, &p).unwrap();
        assert_relative_eq!(r1[0] - r0[0], delta, max_relative = 1e-9);
        assert_relative_eq!(r1[1] - r0[1], -230.0 * 3000.0 * delta, max_relative = 1e-9);
    }

    #[test]
    fn newton_operating_point_satisfies_residuals() {
        let p = StackParams::default();
        let es = solve_operating_point(th(), 1e6, 353.15, 101_325.0, &p).unwrap();
        let r = electro_residual(th(), &es, 101_325.0, &p).unwrap();
        assert!(r[0].abs() < 1e-9 && r[1].abs() < 1e-9 * 1e6, "{r:?}");
        let b = operating_point_bisection(th(), 1e6, 353.15, 101_325.0, &p).unwrap();
        assert_relative_eq!(es.current, b.current, max_relative = 1e-9);
    }

    #[test]
    fn zero_power_gives_open_circuit() {
        let p = StackParams::default();
        let es = solve_operating_point(th(), 0.0, 330.0, P0, &p).unwrap();
        assert_eq!(es.current, 0.0);
        assert_eq!(es.voltage, reversible_voltage(th(), 330.0, P0).unwrap());
    }

    #[test]
    fn f2_out_of_range_is_rejected() {
        let p = StackParams { f2: 1.5, ..Default::default() };
        assert_eq!(p.validate(), Err(("f2", "f2 must lie in (0,1]")));
    }

    proptest! {
        #[test]
        fn polarization_curve_is_increasing(i in 0.0..2e4f64, t_c in 20.0..95.0f64) {
            let p = StackParams::default();
            let t = t_c + KELVIN_OFFSET;
            let a = cell_voltage(th(), i, t, P0, &p).unwrap();
            let b = cell_voltage(th(), i * 1.01 + 1e-3, t, P0, &p).unwrap();
            prop_assert!(b > a);
        }

        #[test]
        fn activation_monotone_in_current(i in 0.0..2e4f64, t_c in 20.0..95.0f64) {
            let p = StackParams::default();
            let a = activation_overvoltage(i, t_c, &p).unwrap();
            let b = activation_overvoltage(2.0 * i, t_c, &p).unwrap();
            prop_assert!(b >= a);
        }

        #[test]
        fn production_increases_with_current(i in 0.0..2e4f64) {
            let p = StackParams::default();
            let a = faraday_efficiency(i, &p) * i;
            let b = faraday_efficiency(i + 1.0, &p) * (i + 1.0);
            prop_assert!(b > a);
            prop_assert!(faraday_efficiency(i, &p) < p.f2);
        }
    }
}

//! Gas/liquid separator holdups and the vessel closure shared with the tank.
//!
//! A vessel holds liquid water plus a pure or mixed gas cushion. Its
//! temperature and pressure are algebraic: they are the `(T, P)` at which the
//! thermodynamic internal energy and volume of the holdup equal the stored
//! internal energy and the vessel volume.

use super::UnitError;
use crate::numeric::brent;
use crate::species::{Species, SpeciesVec, GAS_CONSTANT};
use crate::thermo::{split_phases, ThermoModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatorState {
    /// Holdup, mol
    pub n: SpeciesVec,
    /// Internal energy holdup, J
    pub u: f64,
    /// K
    pub t: f64,
    /// Pa
    pub p: f64,
    /// Vessel volume, m^3
    pub volume: f64,
}

impl SeparatorState {
    /// Holdup of a vessel at `(t, p)` with `liquid_volume` m^3 of water and
    /// the rest filled with `gas`.
    pub fn from_conditions(
        thermo: &ThermoModel,
        gas: Species,
        t: f64,
        p: f64,
        volume: f64,
        liquid_volume: f64,
    ) -> Result<Self, UnitError> {
        if !(liquid_volume >= 0.0 && liquid_volume < volume) {
            return Err(UnitError::Precondition(format!(
                "liquid volume {liquid_volume} m^3 must lie in [0, {volume})"
            )));
        }
        let n_water = liquid_volume / thermo.liquid_molar_volume(Species::Water)?;
        let n_gas = p * (volume - liquid_volume) / (GAS_CONSTANT * t);
        let mut n = [n_water, 0.0, 0.0];
        n[gas.index()] += n_gas;
        let u = holdup_internal_energy(thermo, t, p, &n)?;
        Ok(SeparatorState { n, u, t, p, volume })
    }
}

/// `U(T,P,n_H2O)(l) + U(T,P,n_gas)(g)`
pub fn holdup_internal_energy(thermo: &ThermoModel, t: f64, p: f64, n: &SpeciesVec) -> Result<f64, UnitError> {
    let (liquid, gas) = split_phases(n);
    Ok(thermo.internal_energy(&crate::ThermoState::liquid(t, p, liquid))?
        + thermo.internal_energy(&crate::ThermoState::gas(t, p, gas))?)
}

/// `V(T,P,n_H2O)(l) + V(T,P,n_gas)(g)`
pub fn holdup_volume(thermo: &ThermoModel, t: f64, p: f64, n: &SpeciesVec) -> Result<f64, UnitError> {
    let (liquid, gas) = split_phases(n);
    Ok(thermo.volume(&crate::ThermoState::liquid(t, p, liquid))?
        + thermo.volume(&crate::ThermoState::gas(t, p, gas))?)
}

/// `[U_TL - U, V_TL - V_tot]`
pub fn separator_closure(thermo: &ThermoModel, s: &SeparatorState) -> Result<[f64; 2], UnitError> {
    Ok([
        holdup_internal_energy(thermo, s.t, s.p, &s.n)? - s.u,
        holdup_volume(thermo, s.t, s.p, &s.n)? - s.volume,
    ])
}

/// Holdup derivatives `(dn/dt, dU/dt)`. The inlet (stack chamber outflow at
/// the stack temperature `t_upstream`) and outlet are both evaluated at the
/// separator pressure; the vessel is adiabatic.
pub fn separator_rhs(
    thermo: &ThermoModel,
    s: &SeparatorState,
    f_in: &SpeciesVec,
    t_upstream: f64,
    f_out: &SpeciesVec,
) -> Result<(SpeciesVec, f64), UnitError> {
    if f_out.iter().any(|v| *v < 0.0) {
        return Err(UnitError::Precondition("separator outflow commands must be non-negative".into()));
    }
    let dn = std::array::from_fn(|i| f_in[i] - f_out[i]);
    let du = thermo.split_stream_enthalpy_flow(t_upstream, s.p, f_in)?
        - thermo.split_stream_enthalpy_flow(s.t, s.p, f_out)?;
    Ok((dn, du))
}

/// Temperature window in which every present species has a valid correlation.
fn temperature_window(thermo: &ThermoModel, n: &SpeciesVec) -> (f64, f64) {
    let table = thermo.table();
    let mut lo: f64 = 0.0;
    let mut hi = f64::INFINITY;
    for sp in Species::ALL {
        if n[sp.index()] <= 0.0 {
            continue;
        }
        let sc = table.species(sp);
        let pc = match (sp, &sc.liquid) {
            (Species::Water, Some(liq)) => liq,
            _ => &sc.gas,
        };
        lo = lo.max(pc.cp_valid_range[0]);
        hi = hi.min(pc.cp_valid_range[1]);
    }
    (lo, hi)
}

/// Solves the vessel closure for `(T, P)`.
///
/// With an ideal gas and an incompressible liquid the internal energy of the
/// holdup does not depend on pressure, so the energy equation fixes `T` and
/// the volume equation then gives `P` in closed form.
pub fn solve_holdup_closure(thermo: &ThermoModel, n: &SpeciesVec, u: f64, volume: f64) -> Result<(f64, f64), UnitError> {
    let (liquid, gas) = split_phases(n);
    let n_gas: f64 = gas.iter().sum();
    if !(n_gas > 0.0) {
        return Err(UnitError::EmptyGasHoldup);
    }
    let v_liquid = holdup_volume(thermo, 300.0, 1e5, &liquid)?;
    let v_gas = volume - v_liquid;
    if !(v_gas > 0.0) {
        return Err(UnitError::Convergence(format!(
            "liquid holdup {v_liquid:.6} m^3 fills the {volume} m^3 vessel"
        )));
    }
    let (lo, hi) = temperature_window(thermo, n);
    let p_ref = thermo.reference_pressure();
    let t = brent(|t| holdup_internal_energy(thermo, t, p_ref, n).map(|ut| ut - u), lo, hi, 1e-11, 200)
        .map_err(|e| UnitError::Convergence(format!("vessel energy closure in [{lo}, {hi}] K: {e}")))?;
    let p = n_gas * GAS_CONSTANT * t / v_gas;
    Ok((t, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn th() -> &'static ThermoModel {
        ThermoModel::standard()
    }

    fn hydrogen_separator() -> SeparatorState {
        SeparatorState::from_conditions(th(), Species::Hydrogen, 350.0, 1.2e5, 1.0, 0.4).unwrap()
    }

    #[test]
    fn pass_through_has_no_accumulation() {
        let s = hydrogen_separator();
        let f = [30.0, 2.0, 0.0];
        let (dn, du) = separator_rhs(th(), &s, &f, s.t, &f).unwrap();
        assert_eq!(dn, [0.0; 3]);
        assert_eq!(du, 0.0);
    }

    #[test]
    fn filling_vessel_gains_inlet_enthalpy() {
        let s = hydrogen_separator();
        let f = [1.0, 0.5, 0.0];
        let (dn, du) = separator_rhs(th(), &s, &f, 345.0, &[0.0; 3]).unwrap();
        assert_eq!(dn, f);
        assert_eq!(du, th().split_stream_enthalpy_flow(345.0, s.p, &f).unwrap());
    }

    #[test]
    fn constant_flows_integrate_linearly() {
        let s = hydrogen_separator();
        let (f_in, f_out) = ([31.0, 2.5, 0.0], [30.0, 2.0, 0.0]);
        let (dn, _) = separator_rhs(th(), &s, &f_in, s.t, &f_out).unwrap();
        let mut n = s.n;
        for _ in 0..100 {
            for i in 0..3 {
                n[i] += dn[i];
            }
        }
        for i in 0..3 {
            assert_relative_eq!(n[i] - s.n[i], (f_in[i] - f_out[i]) * 100.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn closure_round_trip() {
        let s = SeparatorState::from_conditions(th(), Species::Oxygen, 340.0, 1.5e5, 2.0, 0.0).unwrap();
        let r = separator_closure(th(), &s).unwrap();
        assert!(r[0].abs() < 1e-9 * s.u.abs());
        assert!(r[1].abs() < 1e-12);
    }

    #[test]
    fn internal_energy_enters_closure_linearly() {
        let s = hydrogen_separator();
        let delta = 1234.5;
        let a = separator_closure(th(), &s).unwrap();
        let b = separator_closure(th(), &SeparatorState { u: s.u + delta, ..s }).unwrap();
        assert_relative_eq!(b[0] - a[0], -delta, max_relative = 1e-6);
        assert_eq!(b[1], a[1]);
    }

    #[test]
    fn solved_closure_recovers_conditions() {
        let s = hydrogen_separator();
        let (t, p) = solve_holdup_closure(th(), &s.n, s.u, s.volume).unwrap();
        assert_relative_eq!(t, s.t, max_relative = 1e-10);
        assert_relative_eq!(p, s.p, max_relative = 1e-9);
    }

    #[test]
    fn empty_gas_cushion_is_rejected() {
        let err = solve_holdup_closure(th(), &[100.0, 0.0, 0.0], -2.8e7, 1.0).unwrap_err();
        assert_eq!(err, UnitError::EmptyGasHoldup);
    }

    #[test]
    fn overfull_vessel_is_a_convergence_failure() {
        let n = [60_000.0, 1.0, 0.0];
        let err = solve_holdup_closure(th(), &n, -1.7e10, 1.0).unwrap_err();
        assert!(matches!(err, UnitError::Convergence(_)), "{err}");
    }
}

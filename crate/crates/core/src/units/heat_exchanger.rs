//! Static heat exchangers on the separator water returns.

use super::{TemperatureGuard, UnitError};
use crate::numeric::brent;
use crate::species::{pure, Species};
use crate::thermo::{Phase, ThermoModel};

/// `H(T_sep, P, f) - H(T_HX, P, f) - Q`, W. `q` is the heat removed.
pub fn heat_exchanger_residual(
    thermo: &ThermoModel,
    t_sep: f64,
    pressure: f64,
    f_water: f64,
    t_hx: f64,
    q: f64,
) -> Result<f64, UnitError> {
    let f = pure(Species::Water, f_water);
    Ok(thermo.enthalpy_flow(t_sep, pressure, &f, Phase::Liquid)?
        - thermo.enthalpy_flow(t_hx, pressure, &f, Phase::Liquid)?
        - q)
}

/// Outlet temperature after removing `q` W from `f_water` mol/s of water at `t_sep`.
pub fn solve_heat_exchanger_outlet(
    thermo: &ThermoModel,
    t_sep: f64,
    pressure: f64,
    f_water: f64,
    q: f64,
    guard: &TemperatureGuard,
) -> Result<f64, UnitError> {
    if !(q >= 0.0) {
        return Err(UnitError::Precondition(format!("heat exchanger duty must be non-negative, got {q} W")));
    }
    if !(f_water >= 0.0) {
        return Err(UnitError::Precondition(format!("negative water flow {f_water}")));
    }
    if q == 0.0 {
        return Ok(t_sep);
    }
    if f_water == 0.0 {
        return Err(UnitError::NoFlow(format!("cannot remove {q} W from a zero water flow")));
    }
    guard.check("heat exchanger inlet", t_sep)?;
    // freeze guard: the duty must not take the outlet below the guard
    let at_min = heat_exchanger_residual(thermo, t_sep, pressure, f_water, guard.min, q)?;
    if at_min < 0.0 {
        return Err(UnitError::TemperatureGuard {
            what: format!("heat exchanger outlet (duty {q:.4e} W)"),
            t: guard.min,
            min: guard.min,
            max: guard.max,
        });
    }
    brent(|t| heat_exchanger_residual(thermo, t_sep, pressure, f_water, t, q), guard.min, t_sep, 1e-11, 200)
        .map_err(|e| UnitError::Convergence(format!("heat exchanger outlet: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th() -> &'static ThermoModel {
        ThermoModel::standard()
    }

    #[test]
    fn zero_duty_keeps_temperature() {
        assert_eq!(heat_exchanger_residual(th(), 350.0, 101_325.0, 10.0, 350.0, 0.0).unwrap(), 0.0);
        let t = solve_heat_exchanger_outlet(th(), 350.0, 101_325.0, 10.0, 0.0, &TemperatureGuard::default()).unwrap();
        assert_eq!(t, 350.0);
    }

    #[test]
    fn one_kelvin_drop() {
        let t = solve_heat_exchanger_outlet(th(), 300.0, 101_325.0, 1.0, 75.3, &TemperatureGuard::default()).unwrap();
        let cp = th().cp(Species::Water, Phase::Liquid, 300.0).unwrap();
        let oracle = 75.3 / cp;
        assert!(((300.0 - t) - oracle).abs() / oracle < 0.01);
        assert!(((300.0 - t) - 1.0).abs() < 0.01);
    }

    #[test]
    fn residual_decreases_in_outlet_temperature() {
        let mut last = f64::INFINITY;
        for k in 0..100 {
            let r = heat_exchanger_residual(th(), 350.0, 101_325.0, 5.0, 280.0 + k as f64, 1e3).unwrap();
            assert!(r < last);
            last = r;
        }
    }

    #[test]
    fn freezing_duty_is_guarded() {
        // 80 MW from 55.5 mol/s of water
        let err = solve_heat_exchanger_outlet(th(), 350.0, 101_325.0, 55.5, 80e6, &TemperatureGuard::default()).unwrap_err();
        assert!(matches!(err, UnitError::TemperatureGuard { .. }), "{err}");
    }
}

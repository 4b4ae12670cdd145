//! Static mixing of make-up water with the two recirculated water streams.

use super::UnitError;
use crate::numeric::brent;
use crate::species::{pure, Species};
use crate::thermo::{Phase, ThermoModel};

/// A pure-water stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterStream {
    /// mol/s
    pub flow: f64,
    /// K
    pub t: f64,
}

fn enthalpy_flow(thermo: &ThermoModel, s: &WaterStream, pressure: f64) -> Result<f64, UnitError> {
    Ok(thermo.enthalpy_flow(s.t, pressure, &pure(Species::Water, s.flow), Phase::Liquid)?)
}

/// `[f_in - sum f_k, H(T_in, P, f_in) - sum H_k]` for the make-up and the two
/// heat-exchanger outlet streams.
pub fn mixer_residual(
    thermo: &ThermoModel,
    inflows: &[WaterStream; 3],
    outlet: &WaterStream,
    pressure: f64,
) -> Result<[f64; 2], UnitError> {
    if inflows.iter().chain(std::iter::once(outlet)).any(|s| !(s.flow >= 0.0)) {
        return Err(UnitError::Precondition("mixer flows must be non-negative".into()));
    }
    let total: f64 = inflows.iter().map(|s| s.flow).sum();
    if total == 0.0 && outlet.flow > 0.0 {
        return Err(UnitError::NoFlow(format!("mixer outlet {} mol/s with no inflow", outlet.flow)));
    }
    let mut h_in = 0.0;
    for s in inflows {
        h_in += enthalpy_flow(thermo, s, pressure)?;
    }
    Ok([outlet.flow - total, enthalpy_flow(thermo, outlet, pressure)? - h_in])
}

/// Mixed outlet flow and temperature.
pub fn solve_mixer(thermo: &ThermoModel, inflows: &[WaterStream; 3], pressure: f64) -> Result<WaterStream, UnitError> {
    let flow: f64 = inflows.iter().map(|s| s.flow).sum();
    if !(flow > 0.0) {
        return Err(UnitError::NoFlow("all mixer inflows are zero".into()));
    }
    let active = inflows.iter().filter(|s| s.flow > 0.0);
    let lo = active.clone().map(|s| s.t).fold(f64::INFINITY, f64::min);
    let hi = active.map(|s| s.t).fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(WaterStream { flow, t: lo });
    }
    let t = brent(
        |t| mixer_residual(thermo, inflows, &WaterStream { flow, t }, pressure).map(|r| r[1]),
        lo,
        hi,
        1e-11,
        200,
    )
    .map_err(|e| UnitError::Convergence(format!("mixer temperature: {e}")))?;
    Ok(WaterStream { flow, t })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th() -> &'static ThermoModel {
        ThermoModel::standard()
    }

    const P: f64 = 101_325.0;

    #[test]
    fn single_stream_passes_through() {
        let inflows = [
            WaterStream { flow: 0.0, t: 300.0 },
            WaterStream { flow: 12.0, t: 340.0 },
            WaterStream { flow: 0.0, t: 310.0 },
        ];
        let out = solve_mixer(th(), &inflows, P).unwrap();
        assert_eq!((out.flow, out.t), (12.0, 340.0));
        assert_eq!(mixer_residual(th(), &inflows, &out, P).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn equal_flows_mix_to_the_mean() {
        let inflows = [
            WaterStream { flow: 10.0, t: 320.0 },
            WaterStream { flow: 10.0, t: 340.0 },
            WaterStream { flow: 0.0, t: 300.0 },
        ];
        let out = solve_mixer(th(), &inflows, P).unwrap();
        assert!((out.t - 330.0).abs() < 0.1, "{}", out.t);
    }

    #[test]
    fn scaling_flows_keeps_temperature() {
        let base = [
            WaterStream { flow: 1.5, t: 303.15 },
            WaterStream { flow: 55.0, t: 340.0 },
            WaterStream { flow: 48.0, t: 337.0 },
        ];
        let t1 = solve_mixer(th(), &base, P).unwrap().t;
        let scaled = base.map(|s| WaterStream { flow: 7.0 * s.flow, ..s });
        let t2 = solve_mixer(th(), &scaled, P).unwrap().t;
        assert!((t1 - t2).abs() < 1e-9);
    }

    #[test]
    fn outlet_without_inflow_is_infeasible() {
        let none = [WaterStream { flow: 0.0, t: 300.0 }; 3];
        let err = mixer_residual(th(), &none, &WaterStream { flow: 1.0, t: 300.0 }, P).unwrap_err();
        assert!(matches!(err, UnitError::NoFlow(_)));
        assert!(solve_mixer(th(), &none, P).is_err());
    }
}

//! Inputs that hold the plant at a chosen operating point.

use super::layout::{Disturbances, Inputs};
use super::model::Plant;
use super::DaeError;
use crate::electrochem::{operating_point_bisection, reaction_rate, ElectroState};
use crate::numeric::brent;
use crate::species::{pure, Species};
use crate::thermo::Phase;
use crate::units::stack::{stack_energy_terms, stack_outflows};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancedPoint {
    pub inputs: Inputs,
    pub electro: ElectroState,
    /// mol/s
    pub reaction_rate: f64,
    /// Stack inlet temperature that holds the stack at its target, K.
    pub t_in: f64,
    /// Common outlet temperature of both heat exchangers, K.
    pub t_hx: f64,
}

/// Inputs under which the plant is stationary with the stack at `t_stack`,
/// power `d.power` and stack inlet water `recirculation` mol/s.
///
/// Every outflow command equals the corresponding inflow, the make-up
/// replaces the water split by the reaction, and the exchanger duties cool
/// the recirculated water just enough that the mixed inlet keeps the stack
/// energy balance closed.
pub fn balanced_inputs(plant: &Plant, d: &Disturbances, t_stack: f64, recirculation: f64) -> Result<BalancedPoint, DaeError> {
    let th = plant.thermo();
    let p = &plant.params;
    let pr = p.pressure;
    let guard = p.guard;
    let input_err = |msg: String| DaeError::Input(msg);
    guard.check("design stack", t_stack).map_err(|e| input_err(e.to_string()))?;

    let electro = operating_point_bisection(th, d.power, t_stack, pr, &p.stack).map_err(|e| input_err(e.to_string()))?;
    let r = reaction_rate(electro.current, &p.stack);
    let f_in = pure(Species::Water, recirculation);
    let flows = stack_outflows(&f_in, r).map_err(|e| input_err(e.to_string()))?;

    let net = |t_in: f64| {
        stack_energy_terms(th, t_stack, t_in, pr, &f_in, &flows, d.power, d.t_amb, &p.stack)
            .map(|terms| terms.net())
            .map_err(|e| e.to_string())
    };
    let t_in = brent(net, guard.min, guard.max, 1e-11, 200)
        .map_err(|e| input_err(format!("no stack inlet temperature in the guard range holds {t_stack} K: {e}")))?;

    let (f1, f2) = (flows.anode[0], flows.cathode[0]);
    let recycled = f1 + f2;
    let h = |t: f64, f: f64| th.enthalpy_flow(t, pr, &pure(Species::Water, f), Phase::Liquid).map_err(|e| e.to_string());
    let (t_hx, q1, q2) = if recycled > 0.0 {
        let target = h(t_in, recirculation).map_err(input_err)? - h(d.t_make_up, r).map_err(input_err)?;
        let t_hx = brent(|t| h(t, recycled).map(|v| v - target), guard.min, guard.max, 1e-11, 200)
            .map_err(|e| input_err(format!("no heat exchanger outlet temperature balances the mixer: {e}")))?;
        let q = |f: f64| -> Result<f64, DaeError> { Ok(h(t_stack, f).map_err(input_err)? - h(t_hx, f).map_err(input_err)?) };
        (t_hx, q(f1)?, q(f2)?)
    } else {
        (t_stack, 0.0, 0.0)
    };
    if q1 < 0.0 || q2 < 0.0 {
        return Err(input_err(format!(
            "holding {t_stack} K at {} W needs heating of the recirculated water (outlet {t_hx:.2} K)",
            d.power
        )));
    }

    let inputs = Inputs {
        f_sep1_water: f1,
        f_sep2_water: f2,
        f_make_up: r,
        f_tank_out: r,
        q_hx1: q1,
        q_hx2: q2,
        f_sep1_oxygen: flows.anode[2],
        f_sep2_hydrogen: flows.cathode[1],
    };
    Ok(BalancedPoint { inputs, electro, reaction_rate: r, t_in, t_hx })
}

//! Steady state at fixed holdup moles.
//!
//! With arbitrary inputs the mole balances need not close, so the steady
//! state is sought for the energy states only: the unknowns are the stack
//! temperature, the three internal energies and `y`; the holdup moles stay
//! at their given values and their drift rates are reported.

use nalgebra::DVector;

use super::init::consistent_init;
use super::layout::{AlgebraicVars, DifferentialVars, Disturbances, Inputs, PlantState, N_ALG, N_DIFF};
use super::model::Plant;
use super::DaeError;
use crate::numeric::{max_abs, NewtonOptions, NewtonSolver};

/// Differential states solved for.
const ENERGY_STATES: [usize; 4] = [0, 3, 6, 8];
/// Differential states held fixed.
const MOLE_STATES: [usize; 5] = [1, 2, 4, 5, 7];
const N: usize = ENERGY_STATES.len() + N_ALG;

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub state: PlantState,
    /// `dn/dt` of the fixed holdups `[sep1 H2O, sep1 O2, sep2 H2O, sep2 H2, tank H2]`, mol/s.
    pub mole_drift: [f64; 5],
    /// Scaled max-norm of the energy derivatives and `g`.
    pub residual_norm: f64,
    /// Newton solves used (1 when plain Newton converged).
    pub continuation_steps: usize,
}

impl SteadyState {
    /// True when the holdup moles are also stationary (to `tol` mol/s).
    pub fn is_mass_balanced(&self, tol: f64) -> bool {
        self.mole_drift.iter().all(|v| v.abs() <= tol)
    }
}

fn split(x: &DifferentialVars, y: &AlgebraicVars) -> DVector<f64> {
    let xa = x.to_array();
    DVector::from_iterator(N, ENERGY_STATES.iter().map(|&i| xa[i]).chain(y.to_array()))
}

fn join(base: &DifferentialVars, z: &DVector<f64>) -> PlantState {
    let mut xa = base.to_array();
    for (k, &i) in ENERGY_STATES.iter().enumerate() {
        xa[i] = z[k];
    }
    PlantState { x: DifferentialVars::from_array(&xa), y: AlgebraicVars::from_array(&z.as_slice()[ENERGY_STATES.len()..]) }
}

/// Pseudo-transient residual: `(x - x_prev)/h - f` for the energy states
/// (plain `-f` when `h` is infinite) followed by `g`.
fn reduced_residual(
    plant: &Plant,
    base: &DifferentialVars,
    prev: &DVector<f64>,
    h: f64,
    z: &DVector<f64>,
    u: &Inputs,
    d: &Disturbances,
) -> Result<DVector<f64>, DaeError> {
    let s = join(base, z);
    let ev = plant.evaluate(&s.x, &s.y, u, d)?;
    let mut out = DVector::zeros(N);
    for (k, &i) in ENERGY_STATES.iter().enumerate() {
        let accumulation = if h.is_finite() { (z[k] - prev[k]) / h } else { 0.0 };
        out[k] = accumulation - ev.f[i];
    }
    for j in 0..N_ALG {
        out[ENERGY_STATES.len() + j] = ev.g[j];
    }
    Ok(out)
}

/// Steady state of the energy states for inputs `(u, d)`, starting from `x`.
///
/// Damped Newton is tried first; if it fails, pseudo-transient continuation
/// (implicit Euler on the energy states with growing steps) takes over.
pub fn steady_state(plant: &Plant, x: &DifferentialVars, u: &Inputs, d: &Disturbances, tol: f64) -> Result<SteadyState, DaeError> {
    let y0 = consistent_init(plant, x, None, u, d, tol)?;
    let sc = plant.scales(&PlantState { x: *x, y: y0 }, u, d);
    let pick = |v: &DVector<f64>| {
        DVector::from_iterator(N, ENERGY_STATES.iter().map(|&i| v[i]).chain((N_DIFF..N_DIFF + N_ALG).map(|i| v[i])))
    };
    let (var, res) = (pick(&sc.var), pick(&sc.res));
    let mut newton = NewtonSolver::new(NewtonOptions { tol, max_iter: 100, ..NewtonOptions::default() });

    let start = split(x, &y0);
    let mut z = start.clone();
    let mut steps = 1;
    let direct = newton.solve(&mut z, &var, &res, |zz| reduced_residual(plant, x, &start, f64::INFINITY, zz, u, d));
    if direct.is_err() {
        z = start.clone();
        let mut h = 10.0;
        let mut last_err = String::new();
        loop {
            if steps > 400 {
                return Err(DaeError::SteadyState(format!("continuation did not converge: {last_err}")));
            }
            steps += 1;
            let prev = z.clone();
            newton.invalidate();
            match newton.solve(&mut z, &var, &res, |zz| reduced_residual(plant, x, &prev, h, zz, u, d)) {
                Ok(_) => {
                    if !h.is_finite() {
                        break;
                    }
                    h = if h >= 1e9 { f64::INFINITY } else { h * 4.0 };
                }
                Err(e) => {
                    last_err = e.to_string();
                    z = prev;
                    if !h.is_finite() {
                        h = 1e9;
                    } else {
                        h *= 0.25;
                    }
                    if h < 1e-3 {
                        return Err(DaeError::SteadyState(format!("continuation stalled: {last_err}")));
                    }
                }
            }
        }
    }

    let state = join(x, &z);
    let r = reduced_residual(plant, x, &z, f64::INFINITY, &z, u, d)?.component_div(&res);
    let ev = plant.evaluate(&state.x, &state.y, u, d)?;
    let mole_drift = MOLE_STATES.map(|i| ev.f[i]);
    if let Err(source) = plant.check_guard(&state) {
        return Err(DaeError::Guard { t: f64::INFINITY, source });
    }
    Ok(SteadyState { state, mole_drift, residual_norm: max_abs(&r).1, continuation_steps: steps })
}

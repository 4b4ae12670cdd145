//! Consistent initialization: given `x`, `u` and `d`, find `y` with `g = 0`.

use nalgebra::DVector;

use super::layout::{eq, AlgebraicVars, DifferentialVars, Disturbances, Inputs, PlantState, N_ALG, N_DIFF};
use super::model::Plant;
use super::DaeError;
use crate::electrochem::operating_point_bisection;
use crate::numeric::{max_abs, NewtonError, NewtonOptions, NewtonSolver};
use crate::units::compressor::isentropic_temperature;
use crate::units::heat_exchanger::solve_heat_exchanger_outlet;
use crate::units::mixer::{solve_mixer, WaterStream};
use crate::units::separator::solve_holdup_closure;
use crate::units::tank::solve_tank_closure;
use crate::units::UnitError;

fn at(index: usize) -> impl Fn(UnitError) -> DaeError {
    move |source| DaeError::equation(index, source)
}

/// Scaled max-norm of `g(x, y)`, with the worst algebraic equation (global index).
pub fn algebraic_residual_norm(
    plant: &Plant,
    x: &DifferentialVars,
    y: &AlgebraicVars,
    u: &Inputs,
    d: &Disturbances,
) -> Result<(usize, f64), DaeError> {
    let g = plant.algebraic_residual(x, y, u, d)?;
    let sc = plant.scales(&PlantState { x: *x, y: *y }, u, d);
    let scaled = DVector::from_iterator(N_ALG, (0..N_ALG).map(|i| g[i] / sc.res[N_DIFF + i]));
    let (i, v) = max_abs(&scaled);
    Ok((N_DIFF + i, v))
}

/// Solves the algebraic blocks one after another. The blocks are triangular
/// in `y` for fixed `x`, so this is already an exact solution up to the
/// scalar root-finder tolerances.
pub fn sequential_seed(plant: &Plant, x: &DifferentialVars, u: &Inputs, d: &Disturbances) -> Result<AlgebraicVars, DaeError> {
    let th = plant.thermo();
    let p = &plant.params;
    let pr = p.pressure;

    let es = operating_point_bisection(th, d.power, x.t_stack, pr, &p.stack).map_err(|e| at(eq::G_EL)(e.into()))?;
    let n1 = [x.n_sep1_water, 0.0, x.n_sep1_oxygen];
    let (t_sep1, p_sep1) = solve_holdup_closure(th, &n1, x.u_sep1, p.separator1_volume).map_err(at(eq::G_SEP1))?;
    let n2 = [x.n_sep2_water, x.n_sep2_hydrogen, 0.0];
    let (t_sep2, p_sep2) = solve_holdup_closure(th, &n2, x.u_sep2, p.separator2_volume).map_err(at(eq::G_SEP2))?;
    let (t_tank, p_tank) = solve_tank_closure(th, x.n_tank, x.u_tank, &p.tank).map_err(at(eq::G_TANK))?;

    let outlets = p.compressor.stage_pressures(p_sep2, p_tank);
    let mut t_comp = [0.0; 3];
    let mut p_stage_in = p_sep2;
    for k in 0..3 {
        let t_stage_in = p.compressor.stage_inlet_temperature(k, t_sep2);
        t_comp[k] = isentropic_temperature(th, t_stage_in, p_stage_in, outlets[k]).map_err(at(eq::G_COMP + k))?;
        p_stage_in = outlets[k];
    }

    let hx = |k: usize, t_sep: f64, flow: f64, q: f64| -> Result<f64, DaeError> {
        if flow > 0.0 {
            solve_heat_exchanger_outlet(th, t_sep, pr, flow, q, &p.guard).map_err(at(eq::G_HX + k))
        } else {
            Ok(t_sep)
        }
    };
    let t_hx1 = hx(0, t_sep1, u.f_sep1_water, u.q_hx1)?;
    let t_hx2 = hx(1, t_sep2, u.f_sep2_water, u.q_hx2)?;

    let inflows = [
        WaterStream { flow: u.f_make_up, t: d.t_make_up },
        WaterStream { flow: u.f_sep1_water, t: t_hx1 },
        WaterStream { flow: u.f_sep2_water, t: t_hx2 },
    ];
    let mixed = if inflows.iter().any(|s| s.flow > 0.0) {
        solve_mixer(th, &inflows, pr).map_err(at(eq::G_MIXER))?
    } else {
        WaterStream { flow: 0.0, t: d.t_make_up }
    };

    Ok(AlgebraicVars {
        voltage: es.voltage,
        current: es.current,
        t_sep1,
        p_sep1,
        t_sep2,
        p_sep2,
        t_comp1: t_comp[0],
        t_comp2: t_comp[1],
        t_comp3: t_comp[2],
        t_tank,
        p_tank,
        t_hx1,
        t_hx2,
        f_in: mixed.flow,
        t_in: mixed.t,
    })
}

/// Finds `y` consistent with `x`, `u` and `d`.
///
/// A `hint` that already satisfies `g` to `tol` (scaled max-norm) is returned
/// unchanged. Otherwise the blocks are seeded one by one and polished by
/// Newton on the full `g`.
pub fn consistent_init(
    plant: &Plant,
    x: &DifferentialVars,
    hint: Option<&AlgebraicVars>,
    u: &Inputs,
    d: &Disturbances,
    tol: f64,
) -> Result<AlgebraicVars, DaeError> {
    u.validate().map_err(DaeError::Input)?;
    d.validate().map_err(DaeError::Input)?;
    if let Some(h) = hint {
        if let Ok((_, norm)) = algebraic_residual_norm(plant, x, h, u, d) {
            if norm <= tol {
                return Ok(*h);
            }
        }
    }
    let seed = sequential_seed(plant, x, u, d)?;
    polish(plant, x, seed, u, d, tol)
}

fn polish(
    plant: &Plant,
    x: &DifferentialVars,
    seed: AlgebraicVars,
    u: &Inputs,
    d: &Disturbances,
    tol: f64,
) -> Result<AlgebraicVars, DaeError> {
    let sc = plant.scales(&PlantState { x: *x, y: seed }, u, d);
    let var = sc.var.rows(N_DIFF, N_ALG).into_owned();
    let res = sc.res.rows(N_DIFF, N_ALG).into_owned();
    let mut y = DVector::from_row_slice(&seed.to_array());
    let mut newton = NewtonSolver::new(NewtonOptions { tol, max_iter: 50, ..NewtonOptions::default() });
    newton
        .solve(&mut y, &var, &res, |yv| {
            let y = AlgebraicVars::from_array(yv.as_slice());
            Ok::<_, DaeError>(DVector::from_row_slice(&plant.algebraic_residual(x, &y, u, d)?))
        })
        .map_err(|e| match e {
            NewtonError::Eval(inner) => inner,
            other => DaeError::Initialization {
                reason: other.to_string(),
                worst: other.worst_equation().map(|i| N_DIFF + i),
            },
        })?;
    Ok(AlgebraicVars::from_array(y.as_slice()))
}

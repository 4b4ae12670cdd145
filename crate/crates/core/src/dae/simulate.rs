//! Driving the integrator over a horizon with piecewise-constant inputs.

use super::init::consistent_init;
use super::integrator::{Integrator, SolverSettings, SolverStats};
use super::layout::{AlgebraicVars, DifferentialVars, Disturbances, Inputs, PlantState};
use super::model::{Outputs, Plant};
use super::DaeError;

/// Right-continuous piecewise-constant inputs and disturbances.
pub trait InputSchedule {
    /// Values in force at `t` (the value after any change at exactly `t`).
    fn at(&self, t: f64) -> (Inputs, Disturbances);
    /// Times at which any signal may change.
    fn breakpoints(&self) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantInputs(pub Inputs, pub Disturbances);

impl InputSchedule for ConstantInputs {
    fn at(&self, _t: f64) -> (Inputs, Disturbances) {
        (self.0, self.1)
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    /// s
    pub t_end: f64,
    /// s
    pub sample_interval: f64,
    pub settings: SolverSettings,
    /// Algebraic guess for the initial state.
    pub initial_hint: Option<AlgebraicVars>,
}

impl SimulationOptions {
    pub fn new(t_end: f64, sample_interval: f64) -> Self {
        SimulationOptions { t_end, sample_interval, settings: SolverSettings::default(), initial_hint: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// s
    pub t: f64,
    pub state: PlantState,
    pub u: Inputs,
    pub d: Disturbances,
    pub outputs: Outputs,
}

/// An input change: `y` is re-initialized while `x` is carried over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscontinuityEvent {
    pub t: f64,
    pub x: DifferentialVars,
    pub y_before: AlgebraicVars,
    pub y_after: AlgebraicVars,
    pub u_before: Inputs,
    pub u_after: Inputs,
    pub d_before: Disturbances,
    pub d_after: Disturbances,
    /// Hydrogen production just before and after, mol/s.
    pub z_before: f64,
    pub z_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// The run stopped at `t`; samples up to that point are kept.
    Failed { t: f64, error: DaeError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<DiscontinuityEvent>,
    pub stats: SolverStats,
    pub termination: Termination,
}

impl Trajectory {
    pub fn is_complete(&self) -> bool {
        matches!(self.termination, Termination::Completed)
    }

    pub fn error(&self) -> Option<&DaeError> {
        match &self.termination {
            Termination::Completed => None,
            Termination::Failed { error, .. } => Some(error),
        }
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Mesh of sample times and breakpoints in `(0, t_end]`.
fn mesh(t_end: f64, interval: f64, breakpoints: &[f64]) -> Vec<(f64, bool, bool)> {
    let mut points: Vec<(f64, bool, bool)> = Vec::new();
    if t_end > 0.0 {
        let count = (t_end / interval * (1.0 + 1e-12)).floor() as usize;
        points.extend((1..=count).map(|k| (k as f64 * interval, true, false)));
        if points.last().is_none_or(|p| !same_time(p.0, t_end)) {
            points.push((t_end, true, false));
        }
    }
    for &b in breakpoints.iter().filter(|b| **b > 0.0 && **b <= t_end) {
        match points.iter_mut().find(|p| same_time(p.0, b)) {
            Some(p) => {
                p.0 = b;
                p.2 = true;
            }
            None => points.push((b, false, true)),
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points
}

/// Integrates from `x0` at `t = 0` to `opts.t_end`.
///
/// Never panics on numerical trouble: failures end the run with
/// [`Termination::Failed`] and the samples collected so far.
pub fn simulate(plant: &Plant, x0: &DifferentialVars, schedule: &dyn InputSchedule, opts: &SimulationOptions) -> Trajectory {
    let mut samples = Vec::new();
    let mut events = Vec::new();
    let mut integrator = Integrator::new(plant, opts.settings.clone());
    let fail = |t: f64, error: DaeError, samples, events, stats| Trajectory {
        samples,
        events,
        stats,
        termination: Termination::Failed { t, error },
    };
    if !(opts.t_end >= 0.0 && opts.sample_interval > 0.0) {
        let e = DaeError::Input(format!(
            "horizon {} s and sample interval {} s must be non-negative and positive",
            opts.t_end, opts.sample_interval
        ));
        return fail(0.0, e, samples, events, integrator.stats);
    }

    let tol = opts.settings.newton_tol;
    let (mut u, mut d) = schedule.at(0.0);
    let y0 = match consistent_init(plant, x0, opts.initial_hint.as_ref(), &u, &d, tol) {
        Ok(y) => y,
        Err(e) => return fail(0.0, e, samples, events, integrator.stats),
    };
    let mut state = PlantState { x: *x0, y: y0 };
    if let Err(source) = plant.check_guard(&state) {
        return fail(0.0, DaeError::Guard { t: 0.0, source }, samples, events, integrator.stats);
    }
    let record = |t: f64, state: &PlantState, u: &Inputs, d: &Disturbances| -> Result<Sample, DaeError> {
        Ok(Sample { t, state: *state, u: *u, d: *d, outputs: plant.outputs(state, u, d)? })
    };
    match record(0.0, &state, &u, &d) {
        Ok(s) => samples.push(s),
        Err(e) => return fail(0.0, e, samples, events, integrator.stats),
    }

    let mut t = 0.0;
    for (tm, is_sample, is_break) in mesh(opts.t_end, opts.sample_interval, &schedule.breakpoints()) {
        if let Err(e) = integrator.advance(&mut state, &mut t, tm, &u, &d) {
            return fail(t, e, samples, events, integrator.stats);
        }
        if is_break {
            let (u_new, d_new) = schedule.at(tm);
            if u_new != u || d_new != d {
                let z_before = match plant.outputs(&state, &u, &d) {
                    Ok(o) => o.hydrogen_production,
                    Err(e) => return fail(t, e, samples, events, integrator.stats),
                };
                let y_after = match consistent_init(plant, &state.x, None, &u_new, &d_new, tol) {
                    Ok(y) => y,
                    Err(e) => return fail(t, e, samples, events, integrator.stats),
                };
                let after = PlantState { x: state.x, y: y_after };
                if let Err(source) = plant.check_guard(&after) {
                    return fail(t, DaeError::Guard { t, source }, samples, events, integrator.stats);
                }
                let z_after = match plant.outputs(&after, &u_new, &d_new) {
                    Ok(o) => o.hydrogen_production,
                    Err(e) => return fail(t, e, samples, events, integrator.stats),
                };
                events.push(DiscontinuityEvent {
                    t: tm,
                    x: state.x,
                    y_before: state.y,
                    y_after,
                    u_before: u,
                    u_after: u_new,
                    d_before: d,
                    d_after: d_new,
                    z_before,
                    z_after,
                });
                state = after;
                u = u_new;
                d = d_new;
                integrator.reset_jacobian();
            }
        }
        if is_sample {
            match record(tm, &state, &u, &d) {
                Ok(s) => samples.push(s),
                Err(e) => return fail(t, e, samples, events, integrator.stats),
            }
        }
    }
    Trajectory { samples, events, stats: integrator.stats, termination: Termination::Completed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_merges_breakpoints_with_samples() {
        let m = mesh(30.0, 10.0, &[10.0, 15.0, 40.0]);
        let times: Vec<f64> = m.iter().map(|p| p.0).collect();
        assert_eq!(times, vec![10.0, 15.0, 20.0, 30.0]);
        assert_eq!(m[0], (10.0, true, true));
        assert_eq!(m[1], (15.0, false, true));
    }

    #[test]
    fn mesh_ends_on_horizon() {
        let m = mesh(25.0, 10.0, &[]);
        let times: Vec<f64> = m.iter().map(|p| p.0).collect();
        assert_eq!(times, vec![10.0, 20.0, 25.0]);
        assert!(mesh(0.0, 10.0, &[0.0]).is_empty());
    }
}

//! Implicit Euler with a Newton corrector on all 24 unknowns.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::layout::{Disturbances, Inputs, PlantState, N_DIFF};
use super::model::Plant;
use super::DaeError;
use crate::numeric::{NewtonError, NewtonOptions, NewtonSolver};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    /// Nominal (and largest) step, s.
    pub step: f64,
    /// Newton threshold on the scaled max-norm residual.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Consecutive step halvings before the run is aborted.
    pub max_rejections: usize,
    /// Evaluate the condition number of the scaled `dg/dy` after every step.
    pub monitor_index: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { step: 1.0, newton_tol: 1e-8, newton_max_iter: 20, max_rejections: 12, monitor_index: false }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), (&'static str, &'static str)> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(("step", "step must be positive"));
        }
        if !(self.newton_tol > 0.0) {
            return Err(("newton_tol", "newton_tol must be positive"));
        }
        if self.newton_max_iter == 0 {
            return Err(("newton_max_iter", "newton_max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub steps: usize,
    pub rejected_steps: usize,
    pub newton_iterations: usize,
    pub jacobian_evals: usize,
    pub residual_evals: usize,
    /// Largest condition number of the scaled `dg/dy` seen, when monitored.
    pub max_condition: Option<f64>,
}

/// A step that did not produce an acceptable state; retried with a smaller step.
#[derive(Debug, Clone)]
struct StepFailure {
    reason: String,
    worst: Option<usize>,
    residual: f64,
}

#[derive(Debug, Clone)]
pub struct Integrator<'a> {
    plant: &'a Plant,
    settings: SolverSettings,
    newton: NewtonSolver,
    last_h: f64,
    /// Current step, grows back to `settings.step` after rejections.
    h: f64,
    pub stats: SolverStats,
}

impl<'a> Integrator<'a> {
    pub fn new(plant: &'a Plant, settings: SolverSettings) -> Self {
        let newton = NewtonSolver::new(NewtonOptions {
            tol: settings.newton_tol,
            max_iter: settings.newton_max_iter,
            ..NewtonOptions::default()
        });
        let h = settings.step;
        Integrator { plant, settings, newton, last_h: f64::NAN, h, stats: SolverStats::default() }
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    /// Forget the cached Jacobian, e.g. after an input discontinuity.
    pub fn reset_jacobian(&mut self) {
        self.newton.invalidate();
    }

    fn try_step(&mut self, state: &PlantState, h: f64, u: &Inputs, d: &Disturbances) -> Result<PlantState, StepFailure> {
        let plant = self.plant;
        let sc = plant.scales(state, u, d);
        if h != self.last_h {
            self.newton.invalidate();
            self.last_h = h;
        }
        let x0 = state.x.to_array();
        let mut z = DVector::from_vec(state.to_vec());
        let result = self.newton.solve(&mut z, &sc.var, &sc.res, |zv| {
            let s = PlantState::from_slice(zv.as_slice());
            let xd: Vec<f64> = (0..N_DIFF).map(|i| (zv[i] - x0[i]) / h).collect();
            let xdot = super::layout::DifferentialVars::from_array(&xd);
            Ok::<_, DaeError>(DVector::from_row_slice(&plant.residual(&s.x, &xdot, &s.y, u, d)?))
        });
        match result {
            Ok(report) => {
                self.stats.newton_iterations += report.iterations;
                self.stats.jacobian_evals += report.jacobian_evals;
                self.stats.residual_evals += report.residual_evals;
            }
            Err(e) => {
                self.newton.invalidate();
                let (worst, residual) = match &e {
                    NewtonError::Eval(inner) => (inner.worst_equation(), f64::NAN),
                    NewtonError::Singular { worst, residual_norm, .. }
                    | NewtonError::NoConvergence { worst, residual_norm, .. }
                    | NewtonError::LineSearch { worst, residual_norm, .. } => (Some(*worst), *residual_norm),
                };
                return Err(StepFailure { reason: e.to_string(), worst, residual });
            }
        }
        let next = PlantState::from_slice(z.as_slice());
        let holdups = [
            ("sep1 H2O", next.x.n_sep1_water),
            ("sep1 O2", next.x.n_sep1_oxygen),
            ("sep2 H2O", next.x.n_sep2_water),
            ("sep2 H2", next.x.n_sep2_hydrogen),
            ("tank H2", next.x.n_tank),
        ];
        if let Some((name, v)) = holdups.iter().find(|(_, v)| *v < 0.0) {
            self.newton.invalidate();
            return Err(StepFailure { reason: format!("{name} holdup would become negative ({v:.3e} mol)"), worst: None, residual: f64::NAN });
        }
        Ok(next)
    }

    /// Advances `state` from `t` to `t_target` with inputs held at `(u, d)`.
    /// The step is halved on failure and regrown after success.
    pub fn advance(
        &mut self,
        state: &mut PlantState,
        t: &mut f64,
        t_target: f64,
        u: &Inputs,
        d: &Disturbances,
    ) -> Result<(), DaeError> {
        let mut rejections = 0;
        while *t < t_target {
            let remaining = t_target - *t;
            let clipped = self.h >= remaining * (1.0 - 1e-9);
            let h = if clipped { remaining } else { self.h };
            match self.try_step(state, h, u, d) {
                Ok(next) => {
                    if let Err(source) = self.plant.check_guard(&next) {
                        return Err(DaeError::Guard { t: *t + h, source });
                    }
                    if self.settings.monitor_index {
                        let c = self.plant.algebraic_condition(&next, u, d).unwrap_or(f64::INFINITY);
                        self.stats.max_condition = Some(self.stats.max_condition.map_or(c, |m| m.max(c)));
                    }
                    *state = next;
                    *t = if clipped { t_target } else { *t + h };
                    self.stats.steps += 1;
                    rejections = 0;
                    self.h = (self.h * 2.0).min(self.settings.step);
                }
                Err(StepFailure { reason, worst, residual }) => {
                    self.stats.rejected_steps += 1;
                    rejections += 1;
                    if rejections > self.settings.max_rejections {
                        let condition = self.plant.algebraic_condition(state, u, d).unwrap_or(f64::NAN);
                        return Err(DaeError::StepFailure { t: *t, h, reason, worst, residual, condition });
                    }
                    self.h = 0.5 * h;
                }
            }
        }
        Ok(())
    }
}

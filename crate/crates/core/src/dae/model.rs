//! Residual assembly `F(x, dx/dt, y) = [dx/dt - f; g]`.

use serde::{Deserialize, Serialize};

use super::layout::{eq, AlgebraicVars, DifferentialVars, Disturbances, Inputs, PlantState, N_ALG, N_DIFF, N_EQ};
use super::DaeError;
use crate::electrochem::{electro_residual, faraday_efficiency, reaction_rate, ElectroState, StackParams};
use crate::numeric::{condition_number, fd_jacobian};
use crate::species::{pure, Species};
use crate::thermo::{Phase, ThermoModel};
use crate::units::compressor::stage_entropy_residual;
use crate::units::heat_exchanger::heat_exchanger_residual;
use crate::units::mixer::{mixer_residual, WaterStream};
use crate::units::separator::{separator_closure, separator_rhs};
use crate::units::stack::{stack_energy_terms, stack_outflows, StackEnergyTerms};
use crate::units::tank::{tank_closure, tank_rhs, TankParams};
use crate::units::{CompressorTrain, SeparatorState, TankState, TemperatureGuard, UnitError};

use nalgebra::DVector;

/// Plant parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantParams {
    pub stack: StackParams,
    /// Stack, heat exchanger and mixer pressure, Pa
    pub pressure: f64,
    /// Oxygen-side separator volume, m^3
    pub separator1_volume: f64,
    /// Hydrogen-side separator volume, m^3
    pub separator2_volume: f64,
    pub tank: TankParams,
    pub compressor: CompressorTrain,
    pub guard: TemperatureGuard,
}

impl Default for PlantParams {
    fn default() -> Self {
        PlantParams {
            stack: StackParams::default(),
            pressure: 101_325.0,
            separator1_volume: 1.0,
            separator2_volume: 1.0,
            tank: TankParams::default(),
            compressor: CompressorTrain::default(),
            guard: TemperatureGuard::default(),
        }
    }
}

impl PlantParams {
    /// Range checks; returns `(field, message)` for the first violation.
    pub fn validate(&self) -> Result<(), (String, String)> {
        let own = |field: &str, msg: &str| Err((field.to_string(), msg.to_string()));
        if let Err((f, m)) = self.stack.validate() {
            return own(&format!("stack.{f}"), m);
        }
        if let Err((f, m)) = self.compressor.validate() {
            return own(&format!("compressor.{f}"), m);
        }
        if self.compressor.stages != 3 {
            return own("compressor.stages", "the plant model has exactly 3 compressor stages");
        }
        if !(self.pressure > 0.0) {
            return own("pressure", "pressure must be positive");
        }
        if !(self.separator1_volume > 0.0) {
            return own("separator1_volume", "separator1_volume must be positive");
        }
        if !(self.separator2_volume > 0.0) {
            return own("separator2_volume", "separator2_volume must be positive");
        }
        if !(self.tank.volume > 0.0) {
            return own("tank.volume", "tank volume must be positive");
        }
        if !(self.tank.heat_transfer_coefficient >= 0.0 && self.tank.heat_transfer_area >= 0.0) {
            return own("tank", "tank heat transfer parameters must be non-negative");
        }
        if !(self.guard.min > 0.0 && self.guard.min < self.guard.max) {
            return own("guard", "guard needs 0 < min < max");
        }
        Ok(())
    }
}

/// `f` and `g` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub f: [f64; N_DIFF],
    pub g: [f64; N_ALG],
}

/// Derived quantities reported alongside the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outputs {
    /// `z = f_out,H2`, mol/s
    pub hydrogen_production: f64,
    /// mol/s
    pub oxygen_production: f64,
    pub faraday_efficiency: f64,
    pub stack: StackEnergyTerms,
    /// Shaft work of each compressor stage, W
    pub compressor_work: [f64; 3],
    /// `H_next_in - H_out` after each stage, W
    pub cooler_duty: [f64; 3],
}

impl Outputs {
    pub fn total_compressor_work(&self) -> f64 {
        self.compressor_work.iter().sum()
    }
}

/// Characteristic magnitudes used to scale unknowns and residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Scales {
    pub var: DVector<f64>,
    pub res: DVector<f64>,
}

fn at(index: usize) -> impl Fn(UnitError) -> DaeError {
    move |source| DaeError::equation(index, source)
}

/// The plant model: parameters plus thermodynamic data.
#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    pub params: PlantParams,
    thermo: ThermoModel,
}

impl Plant {
    pub fn new(params: PlantParams) -> Result<Self, DaeError> {
        Self::with_thermo(params, ThermoModel::standard().clone())
    }

    pub fn with_thermo(params: PlantParams, thermo: ThermoModel) -> Result<Self, DaeError> {
        params.validate().map_err(|(field, msg)| DaeError::Parameter { field, message: msg })?;
        Ok(Plant { params, thermo })
    }

    pub fn thermo(&self) -> &ThermoModel {
        &self.thermo
    }

    pub fn separator1(&self, x: &DifferentialVars, y: &AlgebraicVars) -> SeparatorState {
        SeparatorState {
            n: [x.n_sep1_water, 0.0, x.n_sep1_oxygen],
            u: x.u_sep1,
            t: y.t_sep1,
            p: y.p_sep1,
            volume: self.params.separator1_volume,
        }
    }

    pub fn separator2(&self, x: &DifferentialVars, y: &AlgebraicVars) -> SeparatorState {
        SeparatorState {
            n: [x.n_sep2_water, x.n_sep2_hydrogen, 0.0],
            u: x.u_sep2,
            t: y.t_sep2,
            p: y.p_sep2,
            volume: self.params.separator2_volume,
        }
    }

    pub fn tank(&self, x: &DifferentialVars, y: &AlgebraicVars) -> TankState {
        TankState { n: x.n_tank, u: x.u_tank, t: y.t_tank, p: y.p_tank, params: self.params.tank }
    }

    /// Evaluates `f(x, y, u, d)` and `g(x, y, u, d)`. Failures name the
    /// first equation that could not be evaluated.
    pub fn evaluate(
        &self,
        x: &DifferentialVars,
        y: &AlgebraicVars,
        u: &Inputs,
        d: &Disturbances,
    ) -> Result<Evaluation, DaeError> {
        let th = &self.thermo;
        let p = &self.params;
        let pr = p.pressure;
        let mut f = [0.0; N_DIFF];
        let mut g = [0.0; N_ALG];
        let ga = |i: usize| i - N_DIFF;

        let es = ElectroState { voltage: y.voltage, current: y.current, power: d.power, t: x.t_stack };
        let gel = electro_residual(th, &es, pr, &p.stack).map_err(|e| at(eq::G_EL)(e.into()))?;
        g[ga(eq::G_EL)] = gel[0];
        g[ga(eq::G_EL) + 1] = gel[1];

        let r = reaction_rate(y.current, &p.stack);
        let f_in = pure(Species::Water, y.f_in);
        let flows = stack_outflows(&f_in, r).map_err(at(eq::STACK_ENERGY))?;
        let terms = stack_energy_terms(th, x.t_stack, y.t_in, pr, &f_in, &flows, d.power, d.t_amb, &p.stack)
            .map_err(at(eq::STACK_ENERGY))?;
        f[eq::STACK_ENERGY] = terms.net() / p.stack.heat_capacity;

        let s1 = self.separator1(x, y);
        let out1 = [u.f_sep1_water, 0.0, u.f_sep1_oxygen];
        let (dn, du) = separator_rhs(th, &s1, &flows.anode, x.t_stack, &out1).map_err(at(eq::SEP1))?;
        f[eq::SEP1] = dn[0];
        f[eq::SEP1 + 1] = dn[2];
        f[eq::SEP1 + 2] = du;
        let c = separator_closure(th, &s1).map_err(at(eq::G_SEP1))?;
        g[ga(eq::G_SEP1)] = c[0];
        g[ga(eq::G_SEP1) + 1] = c[1];

        let s2 = self.separator2(x, y);
        let out2 = [u.f_sep2_water, u.f_sep2_hydrogen, 0.0];
        let (dn, du) = separator_rhs(th, &s2, &flows.cathode, x.t_stack, &out2).map_err(at(eq::SEP2))?;
        f[eq::SEP2] = dn[0];
        f[eq::SEP2 + 1] = dn[1];
        f[eq::SEP2 + 2] = du;
        let c = separator_closure(th, &s2).map_err(at(eq::G_SEP2))?;
        g[ga(eq::G_SEP2)] = c[0];
        g[ga(eq::G_SEP2) + 1] = c[1];

        let outlets = p.compressor.stage_pressures(y.p_sep2, y.p_tank);
        let t_comp = y.t_comp();
        let mut p_stage_in = y.p_sep2;
        for k in 0..3 {
            let t_stage_in = p.compressor.stage_inlet_temperature(k, y.t_sep2);
            g[ga(eq::G_COMP) + k] = stage_entropy_residual(th, t_stage_in, p_stage_in, t_comp[k], outlets[k])
                .map_err(at(eq::G_COMP + k))?;
            p_stage_in = outlets[k];
        }

        let tank = self.tank(x, y);
        let (dn, du) = tank_rhs(th, &tank, u.f_sep2_hydrogen, u.f_tank_out, d.t_amb).map_err(at(eq::TANK))?;
        f[eq::TANK] = dn;
        f[eq::TANK + 1] = du;
        let c = tank_closure(th, &tank).map_err(at(eq::G_TANK))?;
        g[ga(eq::G_TANK)] = c[0];
        g[ga(eq::G_TANK) + 1] = c[1];

        // With no flow through an exchanger its outlet temperature is pinned
        // to the separator temperature.
        let hx = [(y.t_sep1, u.f_sep1_water, y.t_hx1, u.q_hx1), (y.t_sep2, u.f_sep2_water, y.t_hx2, u.q_hx2)];
        for (k, (t_sep, flow, t_hx, q)) in hx.into_iter().enumerate() {
            g[ga(eq::G_HX) + k] = if flow > 0.0 {
                heat_exchanger_residual(th, t_sep, pr, flow, t_hx, q).map_err(at(eq::G_HX + k))?
            } else {
                t_hx - t_sep
            };
        }

        let inflows = [
            WaterStream { flow: u.f_make_up, t: d.t_make_up },
            WaterStream { flow: u.f_sep1_water, t: y.t_hx1 },
            WaterStream { flow: u.f_sep2_water, t: y.t_hx2 },
        ];
        let total = u.f_make_up + u.f_sep1_water + u.f_sep2_water;
        if total > 0.0 {
            let m = mixer_residual(th, &inflows, &WaterStream { flow: y.f_in, t: y.t_in }, pr)
                .map_err(at(eq::G_MIXER))?;
            g[ga(eq::G_MIXER)] = m[0];
            g[ga(eq::G_MIXER) + 1] = m[1];
        } else {
            g[ga(eq::G_MIXER)] = y.f_in;
            g[ga(eq::G_MIXER) + 1] = y.t_in - d.t_make_up;
        }
        Ok(Evaluation { f, g })
    }

    /// Full residual `[dx/dt - f; g]`.
    pub fn residual(
        &self,
        x: &DifferentialVars,
        xdot: &DifferentialVars,
        y: &AlgebraicVars,
        u: &Inputs,
        d: &Disturbances,
    ) -> Result<[f64; N_EQ], DaeError> {
        let ev = self.evaluate(x, y, u, d)?;
        let xd = xdot.to_array();
        let mut out = [0.0; N_EQ];
        for i in 0..N_DIFF {
            out[i] = xd[i] - ev.f[i];
        }
        out[N_DIFF..].copy_from_slice(&ev.g);
        Ok(out)
    }

    /// `dx/dt = f(x, y, u, d)`.
    pub fn derivatives(
        &self,
        x: &DifferentialVars,
        y: &AlgebraicVars,
        u: &Inputs,
        d: &Disturbances,
    ) -> Result<DifferentialVars, DaeError> {
        Ok(DifferentialVars::from_array(&self.evaluate(x, y, u, d)?.f))
    }

    pub fn algebraic_residual(
        &self,
        x: &DifferentialVars,
        y: &AlgebraicVars,
        u: &Inputs,
        d: &Disturbances,
    ) -> Result<[f64; N_ALG], DaeError> {
        Ok(self.evaluate(x, y, u, d)?.g)
    }

    /// Production rates, stack energy terms and compressor duties.
    pub fn outputs(&self, state: &PlantState, u: &Inputs, d: &Disturbances) -> Result<Outputs, DaeError> {
        let th = &self.thermo;
        let p = &self.params;
        let (x, y) = (&state.x, &state.y);
        let r = reaction_rate(y.current, &p.stack);
        let f_in = pure(Species::Water, y.f_in);
        let flows = stack_outflows(&f_in, r).map_err(at(eq::STACK_ENERGY))?;
        let stack = stack_energy_terms(th, x.t_stack, y.t_in, p.pressure, &f_in, &flows, d.power, d.t_amb, &p.stack)
            .map_err(at(eq::STACK_ENERGY))?;

        let f = pure(Species::Hydrogen, u.f_sep2_hydrogen);
        let h = |t: f64, pr: f64| th.enthalpy_flow(t, pr, &f, Phase::Gas).map_err(|e| at(eq::G_COMP)(e.into()));
        let outlets = p.compressor.stage_pressures(y.p_sep2, y.p_tank);
        let t_comp = y.t_comp();
        let mut compressor_work = [0.0; 3];
        let mut cooler_duty = [0.0; 3];
        let mut p_stage_in = y.p_sep2;
        for k in 0..3 {
            let t_stage_in = p.compressor.stage_inlet_temperature(k, y.t_sep2);
            let h_out = h(t_comp[k], outlets[k])?;
            compressor_work[k] = (h_out - h(t_stage_in, p_stage_in)?) / p.compressor.efficiency;
            let t_next = if k < 2 { p.compressor.stage_inlet_temperature(k + 1, y.t_sep2) } else { y.t_tank };
            cooler_duty[k] = h(t_next, outlets[k])? - h_out;
            p_stage_in = outlets[k];
        }
        Ok(Outputs {
            hydrogen_production: flows.cathode[1],
            oxygen_production: flows.anode[2],
            faraday_efficiency: faraday_efficiency(y.current, &p.stack),
            stack,
            compressor_work,
            cooler_duty,
        })
    }

    /// Heat capacity of a holdup, J/K, with reference-temperature heat capacities.
    fn holdup_heat_capacity(&self, liquid_water: f64, gas: f64) -> f64 {
        let t0 = self.thermo.reference_temperature();
        let cl = self.thermo.cp(Species::Water, Phase::Liquid, t0).unwrap_or(75.3);
        let cg = self.thermo.cp(Species::Hydrogen, Phase::Gas, t0).unwrap_or(28.8);
        liquid_water.abs() * cl + gas.abs() * cg
    }

    /// Scales for the 24 unknowns `[x, y]` and the 24 residuals.
    ///
    /// Unknowns: temperatures 1 K, pressures 1 kPa, moles 1e-3 of the holdup,
    /// internal energies one kelvin's worth of holdup heat capacity.
    /// Residuals are chosen so that a scaled residual of 1e-8 sits well above
    /// floating-point noise in every equation.
    pub fn scales(&self, state: &PlantState, u: &Inputs, d: &Disturbances) -> Scales {
        let x = &state.x;
        let moles = |n: f64| (1e-3 * n.abs()).max(1e-3);
        let c1 = self.holdup_heat_capacity(x.n_sep1_water, x.n_sep1_oxygen).max(1.0);
        let c2 = self.holdup_heat_capacity(x.n_sep2_water, x.n_sep2_hydrogen).max(1.0);
        let ct = self.holdup_heat_capacity(0.0, x.n_tank).max(1.0);
        let xs = [1.0, moles(x.n_sep1_water), moles(x.n_sep1_oxygen), c1, moles(x.n_sep2_water), moles(x.n_sep2_hydrogen), c2, moles(x.n_tank), ct];
        let ys = [1.0, 1.0, 1.0, 1e3, 1.0, 1e3, 1.0, 1.0, 1.0, 1.0, 1e3, 1.0, 1.0, 1.0, 1.0];
        let var = DVector::from_iterator(N_EQ, xs.iter().chain(ys.iter()).copied());

        let t0 = self.thermo.reference_temperature();
        let cp_l = self.thermo.cp(Species::Water, Phase::Liquid, t0).unwrap_or(75.3);
        let stream = |flow: f64| if flow > 0.0 { (flow * cp_l * 1e-3).max(1e-6) } else { 1e-3 };
        let total = u.f_make_up + u.f_sep1_water + u.f_sep2_water;
        let mut res = [0.0; N_EQ];
        res[..N_DIFF].copy_from_slice(&xs);
        let g = [
            1e-4,
            1e-4 * d.power.max(1e3),
            c1,
            1e-6 * self.params.separator1_volume,
            c2,
            1e-6 * self.params.separator2_volume,
            1e-4,
            1e-4,
            1e-4,
            ct,
            1e-6 * self.params.tank.volume,
            stream(u.f_sep1_water),
            stream(u.f_sep2_water),
            1e-6 * total.max(1.0),
            stream(total),
        ];
        res[N_DIFF..].copy_from_slice(&g);
        Scales { var, res: DVector::from_row_slice(&res) }
    }

    /// Condition number of the scaled `dg/dy` at `state`.
    pub fn algebraic_condition(&self, state: &PlantState, u: &Inputs, d: &Disturbances) -> Result<f64, DaeError> {
        let sc = self.scales(state, u, d);
        let var = sc.var.rows(N_DIFF, N_ALG).into_owned();
        let res = sc.res.rows(N_DIFF, N_ALG).into_owned();
        let y0 = DVector::from_row_slice(&state.y.to_array());
        let mut g = |yv: &DVector<f64>| -> Result<DVector<f64>, DaeError> {
            let y = AlgebraicVars::from_array(yv.as_slice());
            Ok(DVector::from_row_slice(&self.algebraic_residual(&state.x, &y, u, d)?).component_div(&res))
        };
        let g0 = g(&y0)?;
        let jac = fd_jacobian(&mut g, &y0, &g0, &var)?;
        let scaled = jac * nalgebra::DMatrix::from_diagonal(&var);
        Ok(condition_number(&scaled))
    }

    /// Liquid-water temperatures that the guard watches.
    pub fn guarded_temperatures(state: &PlantState) -> [(&'static str, f64); 6] {
        let (x, y) = (&state.x, &state.y);
        [
            ("stack", x.t_stack),
            ("separator 1", y.t_sep1),
            ("separator 2", y.t_sep2),
            ("heat exchanger 1 outlet", y.t_hx1),
            ("heat exchanger 2 outlet", y.t_hx2),
            ("stack inlet", y.t_in),
        ]
    }

    pub fn check_guard(&self, state: &PlantState) -> Result<(), UnitError> {
        for (what, t) in Self::guarded_temperatures(state) {
            self.params.guard.check(what, t)?;
        }
        Ok(())
    }
}

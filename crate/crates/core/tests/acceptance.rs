//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints one PASS/FAIL line, even when all of them pass.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use alkplant_core::dae::{
    balanced_inputs, simulate, ConstantInputs, Integrator, InputSchedule, SimulationOptions, Trajectory,
    EQUATION_NAMES, N_ALG, N_DIFF, N_EQ,
};
use alkplant_core::electrochem::{
    faraday_efficiency, faraday_efficiency_from_density, operating_point_bisection, reversible_voltage,
    solve_operating_point, ELECTRONS, FARADAY,
};
use alkplant_core::scenario::{self, Schedule};
use alkplant_core::species::GAS_CONSTANT;
use alkplant_core::units::compressor::{compressor_train, stage_entropy_residual, CompressorTrain};
use alkplant_core::{
    AlgebraicVars, DifferentialVars, Disturbances, Phase, Plant, PlantParams, PlantState, ScenarioConfig, Species,
    StackParams, ThermoModel,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

/// The feasible step scenario, run once with the algebraic condition number
/// monitored, plus its wall time and the plot files it wrote.
struct StepRun {
    config: ScenarioConfig,
    trajectory: Trajectory,
    schedule: Schedule,
    elapsed: Duration,
    plot_dir: tempfile::TempDir,
}

fn run_step_scenario() -> StepRun {
    let mut config = ScenarioConfig::load(scenario_path("feasible_step.scenario")).expect("scenario loads");
    config.solver.monitor_index = true;
    let plot_dir = tempfile::tempdir().expect("temp dir");
    let start = Instant::now();
    let out = scenario::run(&config, plot_dir.path()).expect("scenario runs");
    let elapsed = start.elapsed();
    let plant = Plant::new(config.plant.clone()).unwrap();
    let schedule = scenario::build_schedule(&config, &plant).unwrap();
    StepRun { config, trajectory: out.trajectory, schedule, elapsed, plot_dir }
}

fn reversible_voltage_at_reference() -> Outcome {
    let th = ThermoModel::standard();
    let (t0, p0) = (th.reference_temperature(), th.reference_pressure());
    // Oracle straight from the table constants: dG0 = dHf0 - T0 dS0.
    let tab = th.table();
    let liquid = tab.species(Species::Water).liquid.as_ref().unwrap();
    let (h2, o2) = (&tab.species(Species::Hydrogen).gas, &tab.species(Species::Oxygen).gas);
    let dh = h2.h_formation + 0.5 * o2.h_formation - liquid.h_formation;
    let ds = h2.s_standard + 0.5 * o2.s_standard - liquid.s_standard;
    let oracle = (dh - t0 * ds) / (ELECTRONS * FARADAY);

    let start = Instant::now();
    let v = reversible_voltage(th, t0, p0).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        (v - 1.229).abs() <= 0.01 && (v - oracle).abs() < 1e-9 && elapsed < Duration::from_millis(1),
        format!("xi_rev = {v:.6} V, table oracle {oracle:.6} V, {elapsed:?}"),
    )
}

fn polarization_consistency() -> Outcome {
    let th = ThermoModel::standard();
    let params = PlantParams::default();
    let (t, pr, sp) = (353.15, params.pressure, &params.stack);
    let powers = [0.5e6, 1.0e6, 1.5e6, 2.0e6, 2.5e6];

    let start = Instant::now();
    let solved: Vec<_> = powers.iter().map(|&p| solve_operating_point(th, p, t, pr, sp)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let mut worst: f64 = 0.0;
    for (&p, s) in powers.iter().zip(&solved) {
        let b = operating_point_bisection(th, p, t, pr, sp).map_err(|e| e.to_string())?;
        worst = worst.max(((s.voltage - b.voltage) / b.voltage).abs()).max(((s.current - b.current) / b.current).abs());
    }
    let monotone = solved.windows(2).all(|w| w[1].voltage > w[0].voltage);
    check(
        worst <= 1e-6 && monotone && elapsed < Duration::from_millis(100),
        format!(
            "max relative gap to bisection {worst:.2e}, xi_cell {:.4}..{:.4} V monotone = {monotone}, {elapsed:?}",
            solved[0].voltage, solved[4].voltage
        ),
    )
}

fn faraday_anchors() -> Outcome {
    let p = StackParams::default();
    let at_zero = faraday_efficiency(0.0, &p);
    let at_knee = faraday_efficiency_from_density(p.f1.sqrt(), &p);
    // Densities up to 10 A/cm^2, far beyond any operating point.
    let peak = (0..=100_000).map(|k| faraday_efficiency_from_density(0.1 * k as f64, &p)).fold(0.0, f64::max);
    check(
        at_zero == 0.0 && at_knee == 0.49 && peak < 0.98,
        format!("eta_F(0) = {at_zero}, eta_F(sqrt(f1)) = {at_knee}, max on grid {peak:.10}"),
    )
}

/// Hydrogen and oxygen atoms held in the separators and tank.
fn atom_inventory(x: &DifferentialVars) -> (f64, f64) {
    let h = 2.0 * (x.n_sep1_water + x.n_sep2_water + x.n_sep2_hydrogen + x.n_tank);
    let o = x.n_sep1_water + x.n_sep2_water + 2.0 * x.n_sep1_oxygen;
    (h, o)
}

fn stoichiometric_conservation(run: &StepRun) -> Outcome {
    let traj = &run.trajectory;
    if !traj.is_complete() {
        return Err(format!("run aborted: {:?}", traj.error()));
    }
    // Inflows: make-up water. Outflows: vented oxygen and hydrogen drawn from the tank.
    // The inputs are piecewise constant, so their integral is exact.
    let mut edges = vec![0.0];
    edges.extend(run.schedule.breakpoints());
    edges.push(run.config.horizon);
    let (mut h_net, mut o_net) = (0.0, 0.0);
    for w in edges.windows(2) {
        let (u, _) = run.schedule.at(w[0]);
        let dt = w[1] - w[0];
        h_net += 2.0 * (u.f_make_up - u.f_tank_out) * dt;
        o_net += (u.f_make_up - 2.0 * u.f_sep1_oxygen) * dt;
    }
    let first = &traj.samples[0];
    let last = traj.last().unwrap();
    let (h0, o0) = atom_inventory(&first.state.x);
    let (h1, o1) = atom_inventory(&last.state.x);
    let (h_err, o_err) = ((h1 - h0 - h_net).abs(), (o1 - o0 - o_net).abs());

    // Integrator tolerance on holdup moles: Newton tolerance times the mole scales.
    let x0 = &first.state.x;
    let mole_scale: f64 = [x0.n_sep1_water, x0.n_sep1_oxygen, x0.n_sep2_water, x0.n_sep2_hydrogen, x0.n_tank]
        .iter()
        .map(|n| (1e-3 * n.abs()).max(1e-3))
        .sum();
    let tol = 10.0 * run.config.solver.newton_tol * mole_scale;

    let ratio_dev = traj
        .samples
        .iter()
        .map(|s| (s.outputs.oxygen_production / s.outputs.hydrogen_production - 0.5).abs())
        .fold(0.0, f64::max);
    check(
        h_err <= tol && o_err <= tol && ratio_dev == 0.0,
        format!("H error {h_err:.2e} mol, O error {o_err:.2e} mol (limit {tol:.2e}), max |O2/H2 - 0.5| = {ratio_dev:e}"),
    )
}

fn compressor_oracle() -> Outcome {
    let th = ThermoModel::standard();
    let train = CompressorTrain::default();
    let (t_in, p_in, p_out, flow) = (300.0, 1e5, 200e5, 1.0);
    let res = compressor_train(th, t_in, p_in, p_out, t_in, flow, &train).map_err(|e| e.to_string())?;

    // Constant-cp multistage formula with intercooling back to the inlet temperature.
    let cp = th.cp(Species::Hydrogen, Phase::Gas, t_in).map_err(|e| e.to_string())?;
    let n = train.stages as f64;
    let ratio = (p_out / p_in).powf(1.0 / n);
    let oracle = n * flow * cp * t_in * (ratio.powf(GAS_CONSTANT / cp) - 1.0) / train.efficiency;
    let gap = (res.total_work - oracle).abs() / oracle;

    let mut worst_entropy: f64 = 0.0;
    for s in &res.stages {
        let r = stage_entropy_residual(th, s.t_in, s.p_in, s.t_out_isentropic, s.p_out).map_err(|e| e.to_string())?;
        worst_entropy = worst_entropy.max((flow * r).abs());
    }
    check(
        gap <= 0.03 && worst_entropy < 1e-9,
        format!(
            "work {:.1} W vs constant-cp {oracle:.1} W ({:.2}%), max stage entropy residual {worst_entropy:.2e} W/K",
            res.total_work,
            100.0 * gap
        ),
    )
}

fn steady_state_closure() -> Outcome {
    let plant = Plant::new(PlantParams::default()).unwrap();
    let d = Disturbances { t_amb: 298.15, power: 1.0e6, t_make_up: 303.15 };
    let design = balanced_inputs(&plant, &d, 343.15, 500.0).map_err(|e| e.to_string())?;
    let mut config = ScenarioConfig::minimal(
        0.0,
        scenario::Signal::constant(scenario::Unit::W, d.power),
    );
    // One kelvin below the design point. The gas outflows are fixed, so a
    // larger offset would drain the separators' gas space during warm-up.
    config.initial.stack_temperature = 342.15;
    config.initial.separator_temperature = 342.15;
    config.initial.separator_liquid_fraction = 0.3;
    config.initial.tank_pressure = 3e6;
    let x0 = scenario::initial_state(&config, &plant).map_err(|e| e.to_string())?;

    // A transient of a few thermal time constants, crossed with large implicit steps.
    let mut opts = SimulationOptions::new(1.0e6, 1.0e5);
    opts.settings.step = 2.0e4;
    let traj = simulate(&plant, &x0, &ConstantInputs(design.inputs, d), &opts);
    if !traj.is_complete() {
        return Err(format!("run aborted: {:?}", traj.error()));
    }
    let last = traj.last().unwrap();
    let u = design.inputs;
    let f = plant.derivatives(&last.state.x, &last.state.y, &u, &d).map_err(|e| e.to_string())?.to_array();
    let sc = plant.scales(&last.state, &u, &d);
    let worst = (0..N_DIFF).map(|i| (f[i] / sc.var[i]).abs()).fold(0.0, f64::max);

    let e = last.outputs.stack;
    let closure = (e.electrical - (e.enthalpy_out - e.enthalpy_in) - e.ambient_loss).abs() / e.electrical;
    check(
        worst < 1e-6 && closure < 1e-6,
        format!(
            "T = {:.4} K after {} steps, max scaled dx/dt {worst:.2e}, energy closure {closure:.2e}",
            last.state.x.t_stack, traj.stats.steps
        ),
    )
}

fn read_plot(path: &std::path::Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').ok_or("bad row")?;
            Ok((a.parse().map_err(|_| "bad t")?, b.parse().map_err(|_| "bad value")?))
        })
        .collect::<Result<_, &str>>()
        .map_err(str::to_string)
}

fn step_response(run: &StepRun) -> Outcome {
    let traj = &run.trajectory;
    let ev = traj.events.first().ok_or("no input discontinuity recorded")?;
    let z_jump = ev.z_after - ev.z_before;
    let y_jump = (ev.y_after.current - ev.y_before.current).abs();

    let dir = run.plot_dir.path();
    let z = read_plot(&dir.join("plot_z_H2_mol_s.csv"))?;
    let t = read_plot(&dir.join("plot_T_K.csv"))?;
    let k = z.iter().position(|p| p.0 == ev.t).ok_or("no sample at the step")?;
    let z_file_jump = z[k].1 - z[k - 1].1;
    // Largest temperature change between consecutive samples, and the time
    // constant implied by the total rise at that peak rate.
    let max_dt = t.windows(2).map(|w| (w[1].1 - w[0].1).abs()).fold(0.0, f64::max);
    let interval = t[1].0 - t[0].0;
    let rise = t.last().unwrap().1 - t[k].1;
    let tau = rise / (max_dt / interval);

    check(
        z_jump > 1.0 && y_jump > 1.0 && z_file_jump > 0.9 * z_jump && max_dt < 0.1 && tau > 100.0 && run.elapsed < Duration::from_secs(30),
        format!(
            "z jumps {:.4} -> {:.4} mol/s at t = {} s, max |dT| per {interval} s sample {max_dt:.4} K, tau >= {tau:.0} s, run {:?}",
            ev.z_before, ev.z_after, ev.t, run.elapsed
        ),
    )
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn integrator_order(run: &StepRun) -> Outcome {
    let traj = &run.trajectory;
    let ev = traj.events.first().ok_or("no input discontinuity recorded")?;
    let start = traj.samples.iter().find(|s| s.t == ev.t).ok_or("no sample at the step")?;
    let plant = Plant::new(run.config.plant.clone()).unwrap();
    let (u, d) = run.schedule.at(ev.t);
    let mut settings = run.config.solver.clone();
    settings.monitor_index = false;
    let sc = plant.scales(&start.state, &u, &d);

    let window = 10.0;
    let solve = |h: f64| -> Result<Vec<f64>, String> {
        let mut s = settings.clone();
        s.step = h;
        let mut integ = Integrator::new(&plant, s);
        let mut state = start.state;
        let mut t = ev.t;
        integ.advance(&mut state, &mut t, ev.t + window, &u, &d).map_err(|e| e.to_string())?;
        if integ.stats.rejected_steps > 0 {
            return Err(format!("step {h} was cut back"));
        }
        Ok(state.x.to_array().iter().enumerate().map(|(i, v)| v / sc.var[i]).collect())
    };
    let steps = [5.0, 2.5, 1.25, 0.625];
    let sols = steps.iter().map(|&h| solve(h)).collect::<Result<Vec<_>, _>>()?;
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let errs: Vec<f64> = sols.windows(2).map(|w| diff(&w[0], &w[1])).collect();
    let orders: Vec<f64> = errs.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let min = orders.iter().copied().fold(f64::INFINITY, f64::min);
    check(
        min >= 0.95,
        format!("successive differences {}, orders {orders:.3?} over a {window} s window after the step", fmt_list(&errs)),
    )
}

fn structural_check(run: &StepRun) -> Outcome {
    let plant = Plant::new(PlantParams::default()).unwrap();
    let counts = N_DIFF == 9
        && N_ALG == 15
        && N_EQ == 24
        && EQUATION_NAMES.len() == N_EQ
        && DifferentialVars::NAMES.len() == N_DIFF
        && AlgebraicVars::NAMES.len() == N_ALG;
    let s = &run.trajectory.samples[0];
    let residual = plant.residual(&s.state.x, &s.state.x, &s.state.y, &s.u, &s.d).map_err(|e| e.to_string())?;
    let state_len = PlantState { x: s.state.x, y: s.state.y }.to_vec().len();
    let stats = &run.trajectory.stats;
    let cond = stats.max_condition.ok_or("condition number not monitored")?;
    check(
        counts && residual.len() == 24 && state_len == 24 && run.trajectory.is_complete() && cond.is_finite() && cond < 1e12,
        format!("9 + 15 = {} equations, max cond(dg/dy) {cond:.3e} over {} converged steps", residual.len(), stats.steps),
    )
}

fn main() {
    let run = run_step_scenario();
    let checks: [(&str, &dyn Fn() -> Outcome); 9] = [
        ("reversible voltage", &reversible_voltage_at_reference),
        ("polarization consistency", &polarization_consistency),
        ("faraday efficiency anchors", &faraday_anchors),
        ("stoichiometric conservation", &|| stoichiometric_conservation(&run)),
        ("compressor oracle", &compressor_oracle),
        ("steady state", &steady_state_closure),
        ("step response", &|| step_response(&run)),
        ("integrator order", &|| integrator_order(&run)),
        ("structural check", &|| structural_check(&run)),
    ];
    let mut failed = 0;
    for (k, (name, f)) in checks.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("[{}] PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[{}] FAIL {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

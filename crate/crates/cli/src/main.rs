use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alkplant_core::dae::{DiscontinuityEvent, SteadyState};
use alkplant_core::scenario::{self, ConfigError};
use alkplant_core::{Error, ScenarioConfig};
use clap::{Parser, Subcommand};

/// Dynamic simulation of an alkaline electrolyzer plant.
#[derive(Debug, Parser)]
#[command(name = "alkplant", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write trajectory.csv plus plot files.
    Simulate {
        scenario: PathBuf,
        /// Output directory (default: the scenario's output.directory, else ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sampling interval in seconds.
        #[arg(long, allow_negative_numbers = true)]
        sample_interval: Option<f64>,
        /// Comma-separated plot channels, e.g. T,xi_cell,I.
        #[arg(long, value_delimiter = ',')]
        channels: Option<Vec<String>>,
    },
    /// Parse and check a scenario without integrating it.
    Validate { scenario: PathBuf },
    /// Solve for the steady state of the inputs in force at t = 0.
    SteadyState { scenario: PathBuf },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_solver_failure() { EXIT_SOLVER } else { EXIT_CONFIG })
}

fn load(path: &Path) -> Result<ScenarioConfig, ExitCode> {
    ScenarioConfig::load(path).map_err(|e| fail(&e.into()))
}

fn print_event(e: &DiscontinuityEvent) {
    println!(
        "input jump at t = {} s: T {:.4} K, xi_cell {:.5} -> {:.5} V, I {:.2} -> {:.2} A",
        e.t, e.x.t_stack, e.y_before.voltage, e.y_after.voltage, e.y_before.current, e.y_after.current
    );
}

fn simulate(path: &Path, out: Option<PathBuf>, interval: Option<f64>, channels: Option<Vec<String>>) -> ExitCode {
    let mut config = match load(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(dt) = interval {
        config.output.sample_interval = dt;
    }
    if let Some(ch) = channels {
        config.output.channels = ch;
    }
    if let Err(e) = config.validate() {
        return fail(&e.into());
    }
    let dir = out
        .or_else(|| config.output.directory.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let run = match scenario::run(&config, &dir) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    for e in &run.trajectory.events {
        print_event(e);
    }
    println!("{}", run.summary);
    let st = &run.trajectory.stats;
    println!(
        "steps: {} accepted, {} rejected; {} Newton iterations, {} Jacobians",
        st.steps, st.rejected_steps, st.newton_iterations, st.jacobian_evals
    );
    println!("wrote {}", run.csv.display());
    for p in &run.plot_files {
        println!("wrote {}", p.display());
    }
    match run.trajectory.error() {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn validate(path: &Path) -> ExitCode {
    let config = match load(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let check = || -> Result<(), Error> {
        for c in config.output.columns.iter().chain(&config.output.channels) {
            scenario::find_column(c).ok_or_else(|| ConfigError::UnknownChannel(c.clone()))?;
        }
        let plant = alkplant_core::Plant::new(config.plant.clone())?;
        scenario::build_schedule(&config, &plant)?;
        scenario::initial_state(&config, &plant)?;
        Ok(())
    };
    match check() {
        Ok(()) => {
            println!("{}: ok (horizon {} s)", path.display(), config.horizon);
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn print_steady(ss: &SteadyState) {
    let (x, y) = (&ss.state.x, &ss.state.y);
    println!("T_stack   {:.4} K", x.t_stack);
    println!("xi_cell   {:.6} V", y.voltage);
    println!("I         {:.3} A", y.current);
    println!("T_sep1    {:.4} K   P_sep1 {:.1} Pa", y.t_sep1, y.p_sep1);
    println!("T_sep2    {:.4} K   P_sep2 {:.1} Pa", y.t_sep2, y.p_sep2);
    println!("T_tank    {:.4} K   P_tank {:.1} Pa", y.t_tank, y.p_tank);
    println!("T_HX1     {:.4} K   T_HX2 {:.4} K", y.t_hx1, y.t_hx2);
    println!("T_in      {:.4} K   f_in {:.4} mol/s", y.t_in, y.f_in);
    println!("residual  {:.3e} (scaled)", ss.residual_norm);
    let names = ["sep1 H2O", "sep1 O2", "sep2 H2O", "sep2 H2", "tank H2"];
    for (n, v) in names.iter().zip(ss.mole_drift) {
        println!("dn/dt {n:<9} {v:+.6e} mol/s");
    }
    if !ss.is_mass_balanced(1e-6) {
        println!("note: holdup moles are not stationary for these inputs");
    }
}

fn steady(path: &Path) -> ExitCode {
    let config = match load(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match scenario::initial_steady_state(&config) {
        Ok(ss) => {
            print_steady(&ss);
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    // Usage errors are configuration errors too; clap's own status would be 2.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Simulate { scenario, out, sample_interval, channels } => {
            simulate(&scenario, out, sample_interval, channels)
        }
        Command::Validate { scenario } => validate(&scenario),
        Command::SteadyState { scenario } => steady(&scenario),
    }
}

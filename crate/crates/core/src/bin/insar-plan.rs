use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use insar_swarm::experiment::{self, ExperimentError, Report, SweepSpec};
use insar_swarm::objective::{formation_bounds, range_bounds};
use insar_swarm::scenario::{parse_override, Scenario, ScenarioError};
use insar_swarm::solution::SolverKind;

/// Formation, velocity and power planning for UAV swarms doing
/// multi-baseline radar interferometry.
#[derive(Parser)]
#[command(name = "insar-plan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML); the built-in mission when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override a scenario key, e.g. --set h_amb_min=2 or --set solver.inner_iterations=200.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario, ScenarioError> {
        match &self.scenario {
            Some(path) => Scenario::load(path, &self.overrides),
            None => Scenario::with_overrides("", &self.overrides),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write trace.csv and solution.json.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "coevolution")]
        solver: SolverKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; results do not depend on it.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Record elapsed seconds in the trace (makes it non-reproducible).
        #[arg(long)]
        wall_clock: bool,
    },
    /// Solve a scenario for several values of one key and summarize.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Key to vary, e.g. h_amb_min, C_min, n_B or I.
        #[arg(long)]
        variable: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Solver(s); repeat or separate with commas.
        #[arg(long = "solver", value_delimiter = ',', default_value = "coevolution")]
        solvers: Vec<SolverKind>,
        /// Comma-separated repetition seeds.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        seeds: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Runs executed concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a scenario and print it with every default filled in.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Pretty-print a solution.json file.
    Report { path: PathBuf },
}

fn fail(err: impl Into<ExperimentError>) -> ExitCode {
    let err = err.into();
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn validate(scenario: &Scenario) -> Result<(), ScenarioError> {
    let params = scenario.params()?;
    print!("{}", scenario.to_toml_string());
    let (lo, hi) = range_bounds(&params);
    println!("\n# resolved");
    println!("# x range       [{lo:.3}, {hi:.3}] m");
    println!("# search dims   {}", formation_bounds(&params).dim() + 1);
    println!("# pairs         {} ({} with HoA limit)", params.pair_count(), params.phase_pairs.len());
    println!("# P_com_max     {:.4} W", params.comm_power_max);
    println!("# E_max         {:.1} J", params.energy_max);
    Ok(())
}

fn report(path: &Path) -> Result<(), ExperimentError> {
    let r = Report::load(path)?;
    print!("{}", r.render());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            solver,
            seed,
            out,
            jobs,
            wall_clock,
        } => {
            let scenario = match scenario.load() {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match experiment::run_experiment(&scenario, solver, seed, &out, jobs, wall_clock) {
                Ok(o) => {
                    let s = &o.solution;
                    println!(
                        "{solver}: {} fitness {} sigma_h {} m v_y {:.3} m/s -> {}",
                        if s.feasible { "feasible" } else { "infeasible" },
                        s.fitness,
                        s.sigma_h(),
                        s.plan.v_y,
                        out.display()
                    );
                    ExitCode::from(o.exit_code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Sweep {
            scenario,
            variable,
            values,
            solvers,
            seeds,
            out,
            jobs,
        } => {
            let scenario = match scenario.load() {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let spec = SweepSpec {
                variable,
                values,
                solvers,
                seeds,
            };
            match experiment::run_sweep(&scenario, &spec, &out, jobs) {
                Ok(o) => {
                    for r in &o.summary {
                        println!(
                            "{} = {:<8} {:<12} feasible {}/{}  median sigma_h {}",
                            r.variable,
                            r.value,
                            r.solver.name(),
                            r.feasible,
                            r.runs,
                            r.median_sigma_h.map_or("-".to_string(), |v| format!("{v:.5} m"))
                        );
                    }
                    ExitCode::from(o.exit_code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Validate { scenario } => match scenario.load().and_then(|s| validate(&s)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Command::Report { path } => match report(&path) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
    }
}

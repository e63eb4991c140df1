//! Running solvers from a scenario and writing their artifacts.
//!
//! A run directory holds `trace.csv` (one row per generation),
//! `solution.json` (the plan, its constraint report and the scenario it was
//! solved under) and, for the co-evolutionary solver, `islands.csv`.
//! A sweep directory holds one run directory per (value, solver, seed) and a
//! `summary.csv` with one row per (value, solver).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{cga_solve, sa_solve};
use crate::coevolution;
use crate::error::SolveError;
use crate::objective::ConstraintFlags;
use crate::rng;
use crate::scenario::{resolve_key, Scenario, ScenarioError};
use crate::solution::{Solution, SolverKind, TraceRow};

pub const EXIT_FEASIBLE: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_OUTPUT: i32 = 66;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("cannot write `{path}`: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver failed: {0}")]
    Solve(#[from] SolveError),
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error("cannot read report `{path}`: {reason}")]
    Report { path: PathBuf, reason: String },
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Scenario(e) => e.exit_code(),
            ExperimentError::Output { .. } => EXIT_OUTPUT,
            ExperimentError::Solve(SolveError::Config(_)) => 65,
            ExperimentError::Solve(_) => EXIT_INTERNAL,
            ExperimentError::Sweep(_) => 64,
            ExperimentError::Report { .. } => 66,
        }
    }
}

fn output_error(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Output {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs `solver` on `scenario`. `workers` bounds the solver's parallelism
/// and never changes its result; `wall_clock` fills the trace's timing
/// column, which does.
pub fn solve(
    scenario: &Scenario,
    solver: SolverKind,
    seed: u64,
    workers: usize,
    wall_clock: bool,
) -> Result<Solution, ExperimentError> {
    let params = scenario.params()?;
    let workers = workers.max(1);
    let solution = match solver {
        SolverKind::Coevolution => {
            let mut config = scenario.coevolution_config(seed, workers);
            config.wall_clock = wall_clock;
            coevolution::solve(&params, &config)?
        }
        SolverKind::Cga => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| SolveError::Pool(e.to_string()))?;
            let mut config = scenario.cga_config(seed, workers > 1);
            config.wall_clock = wall_clock;
            pool.install(|| cga_solve(&params, &config))?
        }
        SolverKind::Sa => {
            let mut config = scenario.sa_config(seed);
            config.wall_clock = wall_clock;
            sa_solve(&params, &config)?
        }
    };
    Ok(solution)
}

/// Writes the per-generation trace as CSV.
pub fn write_trace<W: std::io::Write>(rows: &[TraceRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "generation",
        "wall_time_s",
        "best_fitness",
        "feasible",
        "g2",
        "g5",
        "g6",
        "g7",
        "g8",
        "g10",
        "g11",
        "sigma_h",
        "v_y",
    ])?;
    for r in rows {
        w.serialize((
            r.generation,
            r.wall_time_s,
            r.best_fitness,
            r.feasible,
            r.g2,
            r.g5,
            r.g6,
            r.g7,
            r.g8,
            r.g10,
            r.g11,
            r.sigma_h,
            r.v_y,
        ))?;
    }
    w.flush()?;
    Ok(())
}

fn write_islands<W: std::io::Write>(solution: &Solution, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["generation", "particle", "v_y", "iteration", "best_fitness"])?;
    for island in &solution.islands {
        for (k, f) in island.best_fitness.iter().enumerate() {
            w.serialize((island.generation, island.particle, island.v_y, k, f))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavRow {
    pub uav: usize,
    pub x: f64,
    pub z: f64,
    pub look_angle_deg: f64,
    pub required_rate_bps: f64,
    pub energy_j: f64,
    pub max_power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub i: usize,
    pub j: usize,
    pub baseline_m: f64,
    pub b_perp_m: f64,
    pub h_amb_m: Option<f64>,
    pub gamma_snr: f64,
    pub gamma_rg: f64,
    pub gamma: f64,
    pub sigma_phi_rad: Option<f64>,
    pub sigma_h_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSummary {
    pub min_w: f64,
    pub mean_w: f64,
    pub max_w: f64,
    pub cap_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violations {
    pub g2: f64,
    pub g5: f64,
    pub g6: f64,
    pub g7: f64,
    pub g8: f64,
    pub g10: f64,
    pub g11: f64,
}

/// Structured contents of `solution.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub solver: SolverKind,
    pub seed: u64,
    pub feasible: bool,
    pub fitness: Option<f64>,
    pub sigma_h_m: Option<f64>,
    pub v_y: f64,
    pub mean_altitude_m: f64,
    pub coverage_m2: f64,
    pub uavs: Vec<UavRow>,
    pub pairs: Vec<PairRow>,
    pub power: PowerSummary,
    pub energy_max_j: f64,
    pub violations: Violations,
    pub constraints: ConstraintFlags,
    pub evaluations: u64,
    pub generations: usize,
    pub scenario: Scenario,
}

impl Report {
    pub fn new(solution: &Solution, scenario: &Scenario) -> Result<Self, ScenarioError> {
        let params = scenario.params()?;
        let r = &solution.report;
        let plan = &solution.plan;
        let powers = plan.powers.values();
        let uavs = plan
            .formation
            .positions()
            .iter()
            .enumerate()
            .map(|(i, q)| UavRow {
                uav: i + 1,
                x: q.x,
                z: q.z,
                look_angle_deg: r.look_angles[i].to_degrees(),
                required_rate_bps: r.required_rates[i],
                energy_j: r.energy[i],
                max_power_w: plan.powers.row(i).iter().copied().fold(0.0, f64::max),
            })
            .collect();
        let pairs = r
            .per_pair
            .iter()
            .map(|p| PairRow {
                i: p.i + 1,
                j: p.j + 1,
                baseline_m: p.baseline,
                b_perp_m: p.b_perp,
                h_amb_m: finite(p.hoa),
                gamma_snr: p.gamma_snr,
                gamma_rg: p.gamma_rg,
                gamma: p.gamma,
                sigma_phi_rad: finite(p.sigma_phi),
                sigma_h_m: finite(p.sigma_h),
            })
            .collect();
        Ok(Self {
            solver: solution.solver,
            seed: solution.seed,
            feasible: solution.feasible,
            fitness: finite(solution.fitness),
            sigma_h_m: r.sigma_h.and_then(finite),
            v_y: plan.v_y,
            mean_altitude_m: plan.formation.mean_altitude(),
            coverage_m2: r.coverage,
            uavs,
            pairs,
            power: PowerSummary {
                min_w: powers.iter().copied().fold(f64::INFINITY, f64::min),
                mean_w: powers.iter().sum::<f64>() / powers.len().max(1) as f64,
                max_w: plan.powers.max(),
                cap_w: params.comm_power_max,
            },
            energy_max_j: params.energy_max,
            violations: Violations {
                g2: r.g2,
                g5: r.g5,
                g6: r.g6,
                g7: r.g7,
                g8: r.g8,
                g10: r.g10,
                g11: r.g11,
            },
            constraints: r.flags,
            evaluations: solution.evaluations,
            generations: solution.trace.len().saturating_sub(1),
            scenario: scenario.clone(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let err = |reason: String| ExperimentError::Report {
            path: path.to_path_buf(),
            reason,
        };
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))
    }

    /// Human-readable summary.
    pub fn render(&self) -> String {
        let opt = |x: Option<f64>, digits: usize| x.map_or("inf".to_string(), |v| format!("{v:.digits$}"));
        let mut s = String::new();
        let _ = writeln!(s, "solver      {} (seed {})", self.solver, self.seed);
        let _ = writeln!(
            s,
            "status      {}",
            if self.feasible { "feasible" } else { "INFEASIBLE" }
        );
        let _ = writeln!(s, "sigma_h     {} m", opt(self.sigma_h_m, 5));
        let _ = writeln!(s, "fitness     {}", opt(self.fitness, 5));
        let _ = writeln!(s, "v_y         {:.3} m/s", self.v_y);
        let _ = writeln!(s, "altitude    {:.2} m (mean)", self.mean_altitude_m);
        let _ = writeln!(s, "coverage    {:.0} m^2", self.coverage_m2);
        let _ = writeln!(
            s,
            "power       {:.3} .. {:.3} W (cap {:.3} W)",
            self.power.min_w, self.power.max_w, self.power.cap_w
        );
        let _ = writeln!(s, "\n uav        x (m)    z (m)  theta (deg)   energy (kJ)");
        for u in &self.uavs {
            let _ = writeln!(
                s,
                "{:>4} {:>12.3} {:>8.3} {:>12.3} {:>13.2}",
                u.uav,
                u.x,
                u.z,
                u.look_angle_deg,
                u.energy_j / 1e3
            );
        }
        let _ = writeln!(s, "\npair      b (m)  b_perp (m)  h_amb (m)   gamma   sigma_h (m)");
        for p in &self.pairs {
            let _ = writeln!(
                s,
                "{:>2}-{:<2} {:>9.3} {:>11.3} {:>10} {:>7.4} {:>13}",
                p.i,
                p.j,
                p.baseline_m,
                p.b_perp_m,
                opt(p.h_amb_m, 3),
                p.gamma,
                opt(p.sigma_h_m, 5)
            );
        }
        let v = &self.violations;
        let _ = writeln!(
            s,
            "\nviolations  g2 {:.3e}  g5 {:.3e}  g6 {:.3e}  g7 {:.3e}  g8 {:.3e}  g10 {:.3e}  g11 {:.3e}",
            v.g2, v.g5, v.g6, v.g7, v.g8, v.g10, v.g11
        );
        let c = &self.constraints;
        let flags = [
            ("altitude", c.altitude),
            ("look angle", c.look_angle),
            ("velocity", c.velocity),
            ("power cap", c.power_cap),
            ("safety distance", c.safety_distance),
            ("coverage", c.coverage),
            ("HoA", c.hoa),
            ("rate", c.rate),
            ("energy", c.energy),
        ];
        let failed: Vec<&str> = flags.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
        let _ = writeln!(
            s,
            "constraints {}",
            if failed.is_empty() {
                "all satisfied".to_string()
            } else {
                format!("violated: {}", failed.join(", "))
            }
        );
        let _ = writeln!(s, "evaluations {} over {} generations", self.evaluations, self.generations);
        s
    }
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub solution: Solution,
    pub exit_code: i32,
}

/// Solves and writes `trace.csv`, `solution.json` (and `islands.csv` for
/// the co-evolutionary solver) into `out_dir`.
pub fn run_experiment(
    scenario: &Scenario,
    solver: SolverKind,
    seed: u64,
    out_dir: &Path,
    workers: usize,
    wall_clock: bool,
) -> Result<RunOutcome, ExperimentError> {
    scenario.check()?;
    fs::create_dir_all(out_dir).map_err(output_error(out_dir))?;
    // fail on an unwritable directory before spending any compute
    let trace_path = out_dir.join("trace.csv");
    let trace_file = fs::File::create(&trace_path).map_err(output_error(&trace_path))?;

    let solution = solve(scenario, solver, seed, workers, wall_clock)?;

    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |e: csv::Error| ExperimentError::Output {
            source: std::io::Error::other(e.to_string()),
            path,
        }
    };
    write_trace(&solution.trace, std::io::BufWriter::new(trace_file)).map_err(io(&trace_path))?;
    if solver == SolverKind::Coevolution {
        let path = out_dir.join("islands.csv");
        let file = fs::File::create(&path).map_err(output_error(&path))?;
        write_islands(&solution, std::io::BufWriter::new(file)).map_err(io(&path))?;
    }
    let report = Report::new(&solution, scenario)?;
    let path = out_dir.join("solution.json");
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&path, json + "\n").map_err(output_error(&path))?;

    let exit_code = if solution.feasible { EXIT_FEASIBLE } else { EXIT_INFEASIBLE };
    Ok(RunOutcome { solution, exit_code })
}

/// A one-dimensional sweep over a scenario key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Scenario key, e.g. `h_amb_min`, `C_min`, `n_B` or `I`.
    pub variable: String,
    /// Values as they would be written in the scenario file.
    pub values: Vec<String>,
    pub solvers: Vec<SolverKind>,
    /// Repetition seeds.
    pub seeds: Vec<u64>,
}

impl SweepSpec {
    /// Checks the spec and builds the scenario of every value.
    pub fn scenarios(&self, base: &Scenario) -> Result<Vec<Scenario>, ExperimentError> {
        if self.values.is_empty() || self.seeds.is_empty() || self.solvers.is_empty() {
            return Err(ExperimentError::Sweep("values, solvers and seeds must be non-empty".into()));
        }
        resolve_key(&self.variable)?;
        Ok(self
            .values
            .iter()
            .map(|v| base.with_key(&self.variable, v))
            .collect::<Result<_, _>>()?)
    }

    /// Solver seed of one cell, derived from the repetition seed.
    pub fn cell_seed(&self, solver: SolverKind, value: &str, repetition_seed: u64) -> u64 {
        rng::derive_seed(repetition_seed, &[rng::label_tag(solver.name()), rng::label_tag(value)])
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub variable: String,
    pub value: String,
    pub solver: SolverKind,
    pub runs: usize,
    pub failures: usize,
    pub feasible: usize,
    /// Height-error statistics over feasible runs (m).
    pub median_sigma_h: Option<f64>,
    pub min_sigma_h: Option<f64>,
    pub max_sigma_h: Option<f64>,
    /// Median penalty fitness over all completed runs.
    pub median_fitness: Option<f64>,
}

/// Median of a sample; the mean of the middle pair for even sizes.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub summary: Vec<SummaryRow>,
    pub exit_code: i32,
}

/// Runs every (value, solver, seed) cell, at most `jobs` at a time.
pub fn run_sweep(base: &Scenario, spec: &SweepSpec, out_dir: &Path, jobs: usize) -> Result<SweepOutcome, ExperimentError> {
    let scenarios = spec.scenarios(base)?;
    fs::create_dir_all(out_dir).map_err(output_error(out_dir))?;
    let summary_path = out_dir.join("summary.csv");
    let summary_file = fs::File::create(&summary_path).map_err(output_error(&summary_path))?;

    let mut cells = Vec::new();
    for (v, value) in spec.values.iter().enumerate() {
        for &solver in &spec.solvers {
            for &seed in &spec.seeds {
                cells.push((v, value.as_str(), solver, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Solve(SolveError::Pool(e.to_string())))?;
    let results: Vec<Result<RunOutcome, ExperimentError>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(v, value, solver, seed)| {
                let dir = out_dir
                    .join(format!("{}={}", spec.variable, value))
                    .join(solver.name())
                    .join(format!("seed-{seed}"));
                let run_seed = spec.cell_seed(solver, value, seed);
                let out = run_experiment(&scenarios[v], solver, run_seed, &dir, 1, false);
                if let Err(e) = &out {
                    log::error!("{} = {value}, {solver}, seed {seed}: {e}", spec.variable);
                }
                out
            })
            .collect()
    });

    let mut summary = Vec::new();
    let mut any_failed = false;
    let mut any_infeasible = false;
    for (v, value) in spec.values.iter().enumerate() {
        for &solver in &spec.solvers {
            let runs: Vec<&Result<RunOutcome, ExperimentError>> = cells
                .iter()
                .zip(&results)
                .filter(|((cv, _, cs, _), _)| *cv == v && *cs == solver)
                .map(|(_, r)| r)
                .collect();
            let done: Vec<&Solution> = runs.iter().filter_map(|r| r.as_ref().ok()).map(|o| &o.solution).collect();
            let feasible: Vec<f64> = done.iter().filter(|s| s.feasible).map(|s| s.sigma_h()).collect();
            let fitness: Vec<f64> = done.iter().map(|s| s.fitness).collect();
            let failures = runs.len() - done.len();
            any_failed |= failures > 0;
            any_infeasible |= feasible.len() < done.len();
            summary.push(SummaryRow {
                variable: spec.variable.clone(),
                value: value.clone(),
                solver,
                runs: runs.len(),
                failures,
                feasible: feasible.len(),
                median_sigma_h: median(&feasible),
                min_sigma_h: feasible.iter().copied().reduce(f64::min),
                max_sigma_h: feasible.iter().copied().reduce(f64::max),
                median_fitness: median(&fitness),
            });
        }
    }

    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(summary_file));
    for row in &summary {
        w.serialize(row).map_err(|e| ExperimentError::Output {
            path: summary_path.clone(),
            source: std::io::Error::other(e.to_string()),
        })?;
    }
    w.flush().map_err(output_error(&summary_path))?;

    let exit_code = if any_failed {
        EXIT_INTERNAL
    } else if any_infeasible {
        EXIT_INFEASIBLE
    } else {
        EXIT_FEASIBLE
    };
    Ok(SweepOutcome { summary, exit_code })
}

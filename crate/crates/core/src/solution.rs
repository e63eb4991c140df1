//! Solver output shared by every solver: the final plan, its independent
//! constraint report and a per-generation trace.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::Formation;
use crate::objective::{evaluate_plan, ConstraintReport, Evaluation, SwarmPlan};
use crate::params::ScenarioParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Coevolution,
    Cga,
    Sa,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Coevolution, SolverKind::Cga, SolverKind::Sa];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Coevolution => "coevolution",
            SolverKind::Cga => "cga",
            SolverKind::Sa => "sa",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coevolution" => Ok(SolverKind::Coevolution),
            "cga" => Ok(SolverKind::Cga),
            "sa" => Ok(SolverKind::Sa),
            other => Err(format!("unknown solver `{other}` (expected coevolution, cga or sa)")),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Best-so-far state after one generation (or iteration, for annealing).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub generation: usize,
    /// Seconds since the solver started; only recorded on request because
    /// it makes traces non-reproducible.
    pub wall_time_s: Option<f64>,
    pub best_fitness: f64,
    pub feasible: bool,
    pub g2: f64,
    pub g5: f64,
    pub g6: f64,
    pub g7: f64,
    pub g8: f64,
    pub g10: f64,
    pub g11: f64,
    pub sigma_h: f64,
    pub v_y: f64,
}

/// Inner-swarm convergence of one island.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IslandTrace {
    pub generation: usize,
    pub particle: usize,
    pub v_y: f64,
    pub best_fitness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub solver: SolverKind,
    pub seed: u64,
    pub plan: SwarmPlan,
    pub report: ConstraintReport,
    /// Penalty fitness of the returned plan; equals the fused height error
    /// when the plan is feasible.
    pub fitness: f64,
    pub feasible: bool,
    pub evaluations: u64,
    pub trace: Vec<TraceRow>,
    pub islands: Vec<IslandTrace>,
}

impl Solution {
    pub fn sigma_h(&self) -> f64 {
        self.report.sigma_h.unwrap_or(f64::INFINITY)
    }
}

/// Builds trace rows, re-checking the best plan only when it changes.
pub(crate) struct TraceRecorder<'a> {
    params: &'a ScenarioParams,
    start: Option<Instant>,
    last_key: Option<(Vec<f64>, u64)>,
    last_report: Option<ConstraintReport>,
    pub rows: Vec<TraceRow>,
}

impl<'a> TraceRecorder<'a> {
    pub fn new(params: &'a ScenarioParams, wall_clock: bool) -> Self {
        Self {
            params,
            start: wall_clock.then(Instant::now),
            last_key: None,
            last_report: None,
            rows: Vec::new(),
        }
    }

    /// Appends a row for the best candidate `(formation, v_y)`.
    pub fn record(&mut self, generation: usize, formation: &[f64], v_y: f64, eval: Evaluation, fitness: f64) {
        let key = (formation.to_vec(), v_y.to_bits());
        if self.last_key.as_ref() != Some(&key) {
            self.last_report = plan_report(formation, v_y, self.params).ok();
            self.last_key = Some(key);
        }
        let r = self.last_report.as_ref();
        let g = |f: fn(&ConstraintReport) -> f64| r.map_or(f64::INFINITY, f);
        self.rows.push(TraceRow {
            generation,
            wall_time_s: self.start.map(|s| s.elapsed().as_secs_f64()),
            best_fitness: fitness,
            feasible: eval.feasible,
            g2: g(|r| r.g2),
            g5: g(|r| r.g5),
            g6: g(|r| r.g6),
            g7: g(|r| r.g7),
            g8: g(|r| r.g8),
            g10: g(|r| r.g10),
            g11: g(|r| r.g11),
            sigma_h: eval.objective,
            v_y,
        });
    }
}

fn plan_report(formation: &[f64], v_y: f64, params: &ScenarioParams) -> Result<ConstraintReport, ModelError> {
    let plan = SwarmPlan::with_minimum_powers(Formation::from_interleaved(formation), v_y, params)?;
    evaluate_plan(&plan, params)
}

/// Packages a solver's best candidate as a [`Solution`].
#[allow(clippy::too_many_arguments)]
pub(crate) fn finish(
    solver: SolverKind,
    seed: u64,
    formation: &[f64],
    v_y: f64,
    fitness: f64,
    evaluations: u64,
    trace: Vec<TraceRow>,
    islands: Vec<IslandTrace>,
    params: &ScenarioParams,
) -> Result<Solution, ModelError> {
    let plan = SwarmPlan::with_minimum_powers(Formation::from_interleaved(formation), v_y, params)?;
    let report = evaluate_plan(&plan, params)?;
    Ok(Solution {
        solver,
        seed,
        feasible: report.feasible,
        plan,
        report,
        fitness,
        evaluations,
        trace,
        islands,
    })
}

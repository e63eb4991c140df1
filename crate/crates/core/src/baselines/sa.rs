//! Single-chain simulated annealing with the fast schedule
//! `T_k = T0 / (k + 1)` and Gaussian proposals reflected into the box.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{reflect_into, BaselineOutcome};
use crate::error::{ConfigError, SolveError};
use crate::objective::{evaluate_joint, joint_bounds, Evaluation, SearchBox, WorstFeasible};
use crate::params::ScenarioParams;
use crate::pso::{Objective, TracePoint};
use crate::rng;
use crate::solution::{finish, Solution, SolverKind, TraceRecorder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub iterations: usize,
    pub initial_temperature: f64,
    /// Proposal standard deviation as a fraction of each coordinate's range.
    pub step_scale: f64,
    pub seed: u64,
    pub sigma_cap: f64,
    pub wall_clock: bool,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            iterations: 5000,
            initial_temperature: 10.0,
            step_scale: 0.05,
            seed: 0,
            sigma_cap: 10.0,
            wall_clock: false,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.initial_temperature >= 0.0) {
            return Err(ConfigError::invalid("initial_temperature", "must be non-negative"));
        }
        if !(self.step_scale >= 0.0) {
            return Err(ConfigError::invalid("step_scale", "must be non-negative"));
        }
        if !(self.sigma_cap > 0.0) {
            return Err(ConfigError::invalid("sigma_cap", "must be positive"));
        }
        Ok(())
    }

    /// Temperature at iteration `k` (1-based).
    pub fn temperature(&self, k: usize) -> f64 {
        self.initial_temperature / (k as f64 + 1.0)
    }
}

/// Metropolis rule: improvements and ties always pass; a worsening by
/// `delta` passes with probability `exp(-delta / t)`. A NaN delta comes from
/// two infinite fitnesses and counts as a tie.
pub fn accept(delta: f64, temperature: f64, u: f64) -> bool {
    if delta <= 0.0 || delta.is_nan() {
        return true;
    }
    if temperature <= 0.0 || !delta.is_finite() {
        return false;
    }
    u < (-delta / temperature).exp()
}

/// Minimizes `objective` over `bounds`; `observer` sees the best-ever
/// candidate after the initial point and after every iteration.
pub fn sa_minimize<O, F>(config: &SaConfig, bounds: &SearchBox, objective: &O, mut observer: F) -> BaselineOutcome
where
    O: Objective + ?Sized,
    F: FnMut(usize, &[f64], Evaluation, f64),
{
    let mut rng = rng::stream(config.seed, 0);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let dim = bounds.dim();
    let mut current: Vec<f64> = (0..dim)
        .map(|k| bounds.lower[k] + (bounds.upper[k] - bounds.lower[k]) * rng.random::<f64>())
        .collect();
    let mut current_eval = objective.evaluate(&current);
    let mut worst = WorstFeasible::new(config.sigma_cap);
    worst.observe(&current_eval);
    let mut best = current.clone();
    let mut best_eval = current_eval;
    let mut trace = Vec::with_capacity(config.iterations + 1);

    let mut emit = |k: usize, best: &[f64], e: Evaluation, w: f64, trace: &mut Vec<TracePoint>| {
        let f = e.fitness(w);
        observer(k, best, e, f);
        trace.push(TracePoint {
            iteration: k,
            best_fitness: f,
            feasible: e.feasible,
            violation: e.violation,
            worst_feasible: w,
        });
    };
    emit(0, &best, best_eval, worst.value(), &mut trace);

    for k in 1..=config.iterations {
        let candidate: Vec<f64> = (0..dim)
            .map(|d| {
                let sd = config.step_scale * (bounds.upper[d] - bounds.lower[d]);
                reflect_into(current[d] + sd * unit.sample(&mut rng), bounds.lower[d], bounds.upper[d])
            })
            .collect();
        let eval = objective.evaluate(&candidate);
        worst.observe(&eval);
        let w = worst.value();
        let u: f64 = rng.random();
        if accept(eval.fitness(w) - current_eval.fitness(w), config.temperature(k), u) {
            current = candidate;
            current_eval = eval;
        }
        if current_eval.fitness(w) < best_eval.fitness(w) {
            best.copy_from_slice(&current);
            best_eval = current_eval;
        }
        emit(k, &best, best_eval, w, &mut trace);
    }

    BaselineOutcome {
        best_fitness: best_eval.fitness(worst.value()),
        best_position: best,
        best: best_eval,
        worst,
        evaluations: config.iterations as u64 + 1,
        trace,
    }
}

/// Runs simulated annealing on the joint formation and velocity vector.
pub fn sa_solve(params: &ScenarioParams, config: &SaConfig) -> Result<Solution, SolveError> {
    params.validate()?;
    config.validate()?;
    let bounds = joint_bounds(params);
    let objective = |x: &[f64]| evaluate_joint(x, params);
    let mut recorder = TraceRecorder::new(params, config.wall_clock);
    let out = sa_minimize(config, &bounds, &objective, |k, x, e, f| {
        let (coords, v) = x.split_at(x.len() - 1);
        recorder.record(k, coords, v[0], e, f);
    });
    let (coords, v) = out.best_position.split_at(out.best_position.len() - 1);
    Ok(finish(
        SolverKind::Sa,
        config.seed,
        coords,
        v[0],
        out.best_fitness,
        out.evaluations,
        recorder.rows,
        Vec::new(),
        params,
    )?)
}

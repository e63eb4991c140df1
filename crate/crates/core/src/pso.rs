//! Particle swarm optimizer with a reflecting-wall boundary and a linearly
//! decaying inertia weight.
//!
//! Constraint handling is non-parameterized: every particle carries an
//! [`Evaluation`], and fitness is taken against the worst feasible
//! objective seen so far (see [`WorstFeasible`]).
//!
//! The engine is split into [`Swarm::new`], [`Swarm::advance`] and
//! [`Swarm::absorb`] so callers that evaluate particles themselves (the
//! co-evolutionary outer loop) can drive it; [`run`] wires the three
//! together for an ordinary objective.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::objective::{Evaluation, SearchBox, WorstFeasible};
use crate::rng;

/// Something a swarm can minimize.
pub trait Objective: Sync {
    fn evaluate(&self, x: &[f64]) -> Evaluation;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> Evaluation + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Evaluation {
        self(x)
    }
}

/// Wraps a plain unconstrained cost function.
pub struct Unconstrained<F>(pub F);

impl<F> Objective for Unconstrained<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Evaluation {
        Evaluation::feasible((self.0)(x))
    }
}

/// Population-independent swarm parameters, shared by the inner and outer
/// swarms of the co-evolutionary solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwarmSettings {
    pub population: usize,
    pub iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub inertia_start: f64,
    pub inertia_end: f64,
    pub max_initial_speed: f64,
    pub velocity_clamp: Option<f64>,
}

impl SwarmSettings {
    pub fn new(population: usize, iterations: usize) -> Self {
        Self {
            population,
            iterations,
            c1: 2.5,
            c2: 2.0,
            inertia_start: 0.9,
            inertia_end: 0.4,
            max_initial_speed: 1.0,
            velocity_clamp: None,
        }
    }

    pub fn config(&self, bounds: SearchBox, seed: u64, sigma_cap: f64) -> PsoConfig {
        PsoConfig {
            population: self.population,
            iterations: self.iterations,
            c1: self.c1,
            c2: self.c2,
            inertia_start: self.inertia_start,
            inertia_end: self.inertia_end,
            max_initial_speed: self.max_initial_speed,
            bounds,
            seed,
            sigma_cap,
            parallel: false,
            velocity_clamp: self.velocity_clamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsoConfig {
    pub population: usize,
    pub iterations: usize,
    /// Cognitive learning factor.
    pub c1: f64,
    /// Social learning factor.
    pub c2: f64,
    pub inertia_start: f64,
    pub inertia_end: f64,
    /// Initial velocities are drawn from `U(0, max_initial_speed)`.
    pub max_initial_speed: f64,
    pub bounds: SearchBox,
    pub seed: u64,
    /// Worst-feasible reference used before any feasible particle is seen.
    pub sigma_cap: f64,
    /// Evaluate particles on the rayon pool.
    pub parallel: bool,
    /// Optional bound on every velocity component after each update.
    pub velocity_clamp: Option<f64>,
}

impl PsoConfig {
    pub fn new(bounds: SearchBox, population: usize, iterations: usize, seed: u64) -> Self {
        SwarmSettings::new(population, iterations).config(bounds, seed, 10.0)
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dim()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population == 0 {
            return Err(ConfigError::invalid("population", "must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(ConfigError::invalid("iterations", "must be at least 1"));
        }
        if self.dimension() == 0 {
            return Err(ConfigError::invalid("bounds", "search box has no dimensions"));
        }
        if !(0.0 <= self.inertia_end && self.inertia_end <= self.inertia_start && self.inertia_start <= 1.0) {
            return Err(ConfigError::invalid(
                "inertia",
                "need 0 <= inertia_end <= inertia_start <= 1",
            ));
        }
        if self
            .bounds
            .lower
            .iter()
            .zip(&self.bounds.upper)
            .any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi))
        {
            return Err(ConfigError::invalid("bounds", "need finite lower <= upper"));
        }
        if !(self.max_initial_speed >= 0.0 && self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(ConfigError::invalid(
                "c1",
                "learning factors and initial speed must be non-negative",
            ));
        }
        if let Some(c) = self.velocity_clamp {
            if !(c > 0.0) {
                return Err(ConfigError::invalid("velocity_clamp", "must be positive"));
            }
        }
        Ok(())
    }

    /// Inertia weight at iteration `k` (1-based).
    pub fn inertia(&self, k: usize) -> f64 {
        if self.iterations <= 1 {
            return self.inertia_start;
        }
        let frac = (k.saturating_sub(1)) as f64 / (self.iterations - 1) as f64;
        self.inertia_start + (self.inertia_end - self.inertia_start) * frac
    }
}

/// One row of a convergence trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub best_fitness: f64,
    pub feasible: bool,
    pub violation: f64,
    pub worst_feasible: f64,
}

/// Particle positions, velocities and best-so-far bookkeeping.
#[derive(Debug, Clone)]
pub struct Swarm {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub evaluations: Vec<Evaluation>,
    pub local_best: Vec<Vec<f64>>,
    pub local_best_eval: Vec<Evaluation>,
    pub global_index: usize,
    pub worst: WorstFeasible,
    /// Number of completed position updates.
    pub iteration: usize,
    rngs: Vec<ChaCha8Rng>,
}

/// Which bests changed in [`Swarm::absorb`].
#[derive(Debug, Clone, PartialEq)]
pub struct Improvements {
    pub local: Vec<bool>,
    pub global_changed: bool,
}

/// Reflects `v` if `p + v` leaves `[lo, hi]`; clamps if the reflected move
/// still leaves. Returns the new `(position, velocity)`.
pub fn reflect(p: f64, v: f64, lo: f64, hi: f64) -> (f64, f64) {
    let inside = |x: f64| lo <= x && x <= hi;
    if inside(p + v) {
        return (p + v, v);
    }
    let v = -v;
    if inside(p + v) {
        (p + v, v)
    } else {
        ((p + v).clamp(lo, hi), 0.0)
    }
}

impl Swarm {
    /// Uniform positions in the box and uniform `U(0, v_max)` velocities.
    /// Particles are not evaluated yet.
    pub fn new(config: &PsoConfig, worst: WorstFeasible) -> Self {
        let dim = config.dimension();
        let mut rngs: Vec<ChaCha8Rng> = (0..config.population)
            .map(|d| rng::stream(config.seed, d as u64))
            .collect();
        let mut positions = Vec::with_capacity(config.population);
        let mut velocities = Vec::with_capacity(config.population);
        for r in rngs.iter_mut() {
            let p: Vec<f64> = (0..dim)
                .map(|k| {
                    let (lo, hi) = (config.bounds.lower[k], config.bounds.upper[k]);
                    lo + (hi - lo) * r.random::<f64>()
                })
                .collect();
            let v: Vec<f64> = (0..dim)
                .map(|_| config.max_initial_speed * r.random::<f64>())
                .collect();
            positions.push(p);
            velocities.push(v);
        }
        Self {
            local_best: positions.clone(),
            positions,
            velocities,
            evaluations: Vec::new(),
            local_best_eval: Vec::new(),
            global_index: 0,
            worst,
            iteration: 0,
            rngs,
        }
    }

    pub fn population(&self) -> usize {
        self.positions.len()
    }

    pub fn global_best(&self) -> &[f64] {
        &self.local_best[self.global_index]
    }

    pub fn global_best_eval(&self) -> Evaluation {
        self.local_best_eval[self.global_index]
    }

    pub fn global_best_fitness(&self) -> f64 {
        self.global_best_eval().fitness(self.worst.value())
    }

    /// Replaces particle `index`'s position, e.g. to warm-start from a known point.
    pub fn seed_position(&mut self, index: usize, position: &[f64]) {
        self.positions[index].copy_from_slice(position);
        self.local_best[index].copy_from_slice(position);
    }

    /// Velocity and position update for every particle.
    pub fn advance(&mut self, config: &PsoConfig) {
        let k = self.iteration + 1;
        let w = config.inertia(k);
        let g = self.local_best[self.global_index].clone();
        for d in 0..self.positions.len() {
            let rng = &mut self.rngs[d];
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let p = &mut self.positions[d];
            let v = &mut self.velocities[d];
            let pb = &self.local_best[d];
            for k in 0..p.len() {
                let mut vel = w * v[k] + config.c1 * r1 * (pb[k] - p[k]) + config.c2 * r2 * (g[k] - p[k]);
                if let Some(c) = config.velocity_clamp {
                    vel = vel.clamp(-c, c);
                }
                let (np, nv) = reflect(p[k], vel, config.bounds.lower[k], config.bounds.upper[k]);
                p[k] = np;
                v[k] = nv;
            }
        }
        self.iteration = k;
    }

    /// Records evaluations of the current positions and updates the bests.
    pub fn absorb(&mut self, evaluations: Vec<Evaluation>) -> Improvements {
        assert_eq!(evaluations.len(), self.positions.len());
        for e in &evaluations {
            self.worst.observe(e);
        }
        let worst = self.worst.value();
        let first = self.local_best_eval.is_empty();
        let mut local = vec![false; evaluations.len()];
        if first {
            self.local_best_eval = evaluations.clone();
            self.local_best = self.positions.clone();
            local.iter_mut().for_each(|l| *l = true);
        } else {
            for (d, e) in evaluations.iter().enumerate() {
                if e.fitness(worst) < self.local_best_eval[d].fitness(worst) {
                    self.local_best_eval[d] = *e;
                    self.local_best[d].copy_from_slice(&self.positions[d]);
                    local[d] = true;
                }
            }
        }
        self.evaluations = evaluations;
        let previous = self.global_index;
        let mut best = self.global_index;
        for d in 0..self.local_best_eval.len() {
            if self.local_best_eval[d].fitness(worst) < self.local_best_eval[best].fitness(worst) {
                best = d;
            }
        }
        self.global_index = best;
        let global_changed = first || best != previous || local[best];
        Improvements { local, global_changed }
    }

    pub fn trace_point(&self) -> TracePoint {
        let e = self.global_best_eval();
        TracePoint {
            iteration: self.iteration,
            best_fitness: e.fitness(self.worst.value()),
            feasible: e.feasible,
            violation: e.violation,
            worst_feasible: self.worst.value(),
        }
    }
}

/// Evaluates every particle's current position.
pub fn evaluate_all<O: Objective + ?Sized>(positions: &[Vec<f64>], objective: &O, parallel: bool) -> Vec<Evaluation> {
    if parallel {
        positions.par_iter().map(|p| objective.evaluate(p)).collect()
    } else {
        positions.iter().map(|p| objective.evaluate(p)).collect()
    }
}

/// Random initialization plus evaluation.
pub fn init<O: Objective + ?Sized>(config: &PsoConfig, objective: &O, worst: WorstFeasible) -> Swarm {
    let mut swarm = Swarm::new(config, worst);
    let evals = evaluate_all(&swarm.positions, objective, config.parallel);
    swarm.absorb(evals);
    swarm
}

/// One PSO iteration: move, evaluate, update bests.
pub fn step<O: Objective + ?Sized>(swarm: &mut Swarm, objective: &O, config: &PsoConfig) -> Improvements {
    swarm.advance(config);
    let evals = evaluate_all(&swarm.positions, objective, config.parallel);
    swarm.absorb(evals)
}

/// Result of a complete PSO run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsoOutcome {
    pub best_position: Vec<f64>,
    pub best: Evaluation,
    pub best_fitness: f64,
    pub worst: WorstFeasible,
    /// Row 0 is the initial population, rows `1..=K` follow each update.
    pub trace: Vec<TracePoint>,
}

/// Initializes and runs `config.iterations` updates.
pub fn run<O: Objective + ?Sized>(config: &PsoConfig, objective: &O) -> PsoOutcome {
    run_from(config, objective, WorstFeasible::new(config.sigma_cap), None)
}

/// Like [`run`], with an initial worst-feasible reference and an optional
/// position that replaces particle 0 before the first evaluation.
pub fn run_from<O: Objective + ?Sized>(
    config: &PsoConfig,
    objective: &O,
    worst: WorstFeasible,
    warm_start: Option<&[f64]>,
) -> PsoOutcome {
    let mut swarm = Swarm::new(config, worst);
    if let Some(p) = warm_start {
        swarm.seed_position(0, p);
    }
    let evals = evaluate_all(&swarm.positions, objective, config.parallel);
    swarm.absorb(evals);
    let mut trace = Vec::with_capacity(config.iterations + 1);
    trace.push(swarm.trace_point());
    for _ in 0..config.iterations {
        step(&mut swarm, objective, config);
        trace.push(swarm.trace_point());
    }
    PsoOutcome {
        best_position: swarm.global_best().to_vec(),
        best: swarm.global_best_eval(),
        best_fitness: swarm.global_best_fitness(),
        worst: swarm.worst,
        trace,
    }
}

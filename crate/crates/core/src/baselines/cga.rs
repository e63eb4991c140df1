//! Real-coded genetic algorithm: truncation selection, blend crossover
//! (BLX-alpha) and per-gene Gaussian mutation. The best individual is
//! carried over unmutated, so the population best never worsens.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{reflect_into, BaselineOutcome};
use crate::error::{ConfigError, SolveError};
use crate::objective::{evaluate_joint, joint_bounds, Evaluation, SearchBox, WorstFeasible};
use crate::params::ScenarioParams;
use crate::pso::{evaluate_all, Objective, TracePoint};
use crate::rng;
use crate::solution::{finish, Solution, SolverKind, TraceRecorder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgaConfig {
    pub population: usize,
    pub generations: usize,
    /// Fraction of the population kept as parents.
    pub selection_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each gene's range.
    pub mutation_scale: f64,
    pub blend_alpha: f64,
    pub crossover: bool,
    pub seed: u64,
    pub sigma_cap: f64,
    pub parallel: bool,
    pub wall_clock: bool,
}

impl Default for CgaConfig {
    fn default() -> Self {
        Self {
            population: 500,
            generations: 300,
            selection_rate: 0.3,
            mutation_rate: 0.1,
            mutation_scale: 0.1,
            blend_alpha: 0.1,
            crossover: true,
            seed: 0,
            sigma_cap: 10.0,
            parallel: false,
            wall_clock: false,
        }
    }
}

impl CgaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population == 0 {
            return Err(ConfigError::invalid("population", "must be at least 1"));
        }
        if !(self.selection_rate > 0.0 && self.selection_rate <= 1.0) {
            return Err(ConfigError::invalid("selection_rate", "must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(ConfigError::invalid("mutation_rate", "must lie in [0, 1]"));
        }
        if !(self.mutation_scale >= 0.0 && self.blend_alpha >= 0.0) {
            return Err(ConfigError::invalid("mutation_scale", "scales must be non-negative"));
        }
        if !(self.sigma_cap > 0.0) {
            return Err(ConfigError::invalid("sigma_cap", "must be positive"));
        }
        Ok(())
    }

    fn parents(&self) -> usize {
        let keep = (self.selection_rate * self.population as f64).ceil() as usize;
        keep.clamp(1.min(self.population), self.population)
    }
}

/// Minimizes `objective` over `bounds`. `observer` sees the best-so-far
/// `(generation, position, evaluation, fitness)` after every generation.
pub fn cga_minimize<O, F>(config: &CgaConfig, bounds: &SearchBox, objective: &O, mut observer: F) -> BaselineOutcome
where
    O: Objective + ?Sized,
    F: FnMut(usize, &[f64], Evaluation, f64),
{
    let mut rng = rng::stream(config.seed, 0);
    let dim = bounds.dim();
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut pop: Vec<Vec<f64>> = (0..config.population)
        .map(|_| {
            (0..dim)
                .map(|k| bounds.lower[k] + (bounds.upper[k] - bounds.lower[k]) * rng.random::<f64>())
                .collect()
        })
        .collect();
    let mut evals = evaluate_all(&pop, objective, config.parallel);
    let mut evaluations = pop.len() as u64;
    let mut worst = WorstFeasible::new(config.sigma_cap);
    evals.iter().for_each(|e| worst.observe(e));

    let mut trace = Vec::with_capacity(config.generations + 1);
    let keep = config.parents();

    for generation in 0..=config.generations {
        if generation > 0 {
            let mut next: Vec<Vec<f64>> = pop[..keep].to_vec();
            let mut next_evals: Vec<Option<Evaluation>> = evals[..keep].iter().map(|&e| Some(e)).collect();
            while next.len() < config.population {
                let child = if keep >= 2 && config.crossover {
                    let pair: Vec<&Vec<f64>> = pop[..keep].choose_multiple(&mut rng, 2).collect();
                    (0..dim)
                        .map(|k| {
                            let (a, b) = (pair[0][k], pair[1][k]);
                            let spread = (a - b).abs() * config.blend_alpha;
                            let lo = a.min(b) - spread;
                            let hi = a.max(b) + spread;
                            reflect_into(lo + (hi - lo) * rng.random::<f64>(), bounds.lower[k], bounds.upper[k])
                        })
                        .collect()
                } else {
                    pop[rng.random_range(0..keep)].clone()
                };
                next.push(child);
                next_evals.push(None);
            }
            // index 0 is the elite and is never mutated
            for (ind, ev) in next.iter_mut().zip(next_evals.iter_mut()).skip(1) {
                for k in 0..dim {
                    if rng.random::<f64>() < config.mutation_rate {
                        let sd = config.mutation_scale * (bounds.upper[k] - bounds.lower[k]);
                        let x = ind[k] + sd * unit.sample(&mut rng);
                        ind[k] = reflect_into(x, bounds.lower[k], bounds.upper[k]);
                        *ev = None;
                    }
                }
            }
            let fresh: Vec<usize> = (0..next.len()).filter(|&i| next_evals[i].is_none()).collect();
            let fresh_pos: Vec<Vec<f64>> = fresh.iter().map(|&i| next[i].clone()).collect();
            let fresh_evals = evaluate_all(&fresh_pos, objective, config.parallel);
            evaluations += fresh.len() as u64;
            for (&i, e) in fresh.iter().zip(fresh_evals) {
                worst.observe(&e);
                next_evals[i] = Some(e);
            }
            pop = next;
            evals = next_evals.into_iter().map(|e| e.expect("evaluated")).collect();
        }
        // stable sort: ties keep their previous order, so the elite stays first
        let w = worst.value();
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| evals[a].fitness(w).total_cmp(&evals[b].fitness(w)));
        pop = order.iter().map(|&i| pop[i].clone()).collect();
        evals = order.iter().map(|&i| evals[i]).collect();

        let best_fitness = evals[0].fitness(w);
        observer(generation, &pop[0], evals[0], best_fitness);
        trace.push(TracePoint {
            iteration: generation,
            best_fitness,
            feasible: evals[0].feasible,
            violation: evals[0].violation,
            worst_feasible: w,
        });
    }

    BaselineOutcome {
        best_position: pop[0].clone(),
        best: evals[0],
        best_fitness: evals[0].fitness(worst.value()),
        worst,
        evaluations,
        trace,
    }
}

/// Runs the genetic algorithm on the joint formation and velocity vector.
pub fn cga_solve(params: &ScenarioParams, config: &CgaConfig) -> Result<Solution, SolveError> {
    params.validate()?;
    config.validate()?;
    let bounds = joint_bounds(params);
    let objective = |x: &[f64]| evaluate_joint(x, params);
    let mut recorder = TraceRecorder::new(params, config.wall_clock);
    let out = cga_minimize(config, &bounds, &objective, |k, x, e, f| {
        let (coords, v) = x.split_at(x.len() - 1);
        recorder.record(k, coords, v[0], e, f);
    });
    let (coords, v) = out.best_position.split_at(out.best_position.len() - 1);
    Ok(finish(
        SolverKind::Cga,
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pso::Unconstrained;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn static_population_keeps_best() {
        let config = CgaConfig {
            population: 40,
            generations: 20,
            selection_rate: 1.0,
            mutation_rate: 0.0,
            crossover: false,
            ..CgaConfig::default()
        };
        let out = cga_minimize(&config, &SearchBox::uniform(3, -5.0, 5.0), &Unconstrained(sphere), |_, _, _, _| {});
        let first = out.trace[0].best_fitness;
        assert!(out.trace.iter().all(|t| t.best_fitness == first));
        assert_eq!(out.evaluations, 40);
    }

    #[test]
    fn best_never_worsens() {
        let config = CgaConfig {
            population: 60,
            generations: 40,
            seed: 3,
            ..CgaConfig::default()
        };
        let out = cga_minimize(&config, &SearchBox::uniform(4, -5.0, 5.0), &Unconstrained(sphere), |_, _, _, _| {});
        for w in out.trace.windows(2) {
            assert!(w[1].best_fitness <= w[0].best_fitness);
        }
        assert!(out.best_fitness < out.trace[0].best_fitness);
    }

    #[test]
    fn rejects_zero_selection() {
        let config = CgaConfig {
            selection_rate: 0.0,
            ..CgaConfig::default()
        };
        assert!(config.validate().is_err());
    }
}

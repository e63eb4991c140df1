//! Co-evolutionary planner. An outer swarm searches the swarm velocity;
//! each outer particle runs its own inner formation swarm (an island) at
//! that velocity, and the outer fitness is the island's best formation with
//! the minimum-power schedule layered on top.
//!
//! Islands of one generation run in parallel. Each island's seed depends
//! only on `(seed, particle, generation)`, and the shared worst-feasible
//! reference is merged only between generations, so results do not depend
//! on `worker_count`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, SolveError};
use crate::model::Formation;
use crate::objective::{
    compose_power, evaluate_formation, formation_bounds, power_check, velocity_bounds, Evaluation,
    WorstFeasible,
};
use crate::params::ScenarioParams;
use crate::pso::{self, PsoOutcome, SwarmSettings};
use crate::rng;
use crate::solution::{finish, IslandTrace, Solution, SolverKind, TraceRecorder};

const OUTER_TAG: u64 = 0x6F75_7465_72;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoevolutionConfig {
    /// Outer swarm over the velocity (D2 particles, K2 generations).
    pub outer: SwarmSettings,
    /// Inner formation swarm run by every island (D1 particles, K1 iterations).
    pub inner: SwarmSettings,
    pub worker_count: usize,
    pub seed: u64,
    /// Worst-feasible reference before any feasible candidate is seen (m).
    pub sigma_cap: f64,
    /// Seed each island's first particle with its previous best formation.
    pub warm_start: bool,
    /// Keep inner traces of every generation instead of the last one only.
    pub record_all_islands: bool,
    pub wall_clock: bool,
}

impl Default for CoevolutionConfig {
    fn default() -> Self {
        Self {
            outer: SwarmSettings::new(128, 100),
            inner: SwarmSettings::new(500, 500),
            worker_count: 1,
            seed: 0,
            sigma_cap: 10.0,
            warm_start: false,
            record_all_islands: false,
            wall_clock: false,
        }
    }
}

impl CoevolutionConfig {
    /// Budget `(D1, K1, D2, K2)`.
    pub fn with_budget(inner_pop: usize, inner_iters: usize, outer_pop: usize, outer_gens: usize) -> Self {
        Self {
            outer: SwarmSettings::new(outer_pop, outer_gens),
            inner: SwarmSettings::new(inner_pop, inner_iters),
            ..Self::default()
        }
    }

    pub fn validate(&self, params: &ScenarioParams) -> Result<(), ConfigError> {
        if self.worker_count == 0 {
            return Err(ConfigError::invalid("worker_count", "must be at least 1"));
        }
        if !(self.sigma_cap > 0.0) {
            return Err(ConfigError::invalid("sigma_cap", "must be positive"));
        }
        self.outer_config(params).validate()?;
        self.inner.config(formation_bounds(params), 0, self.sigma_cap).validate()?;
        Ok(())
    }

    fn outer_config(&self, params: &ScenarioParams) -> pso::PsoConfig {
        self.outer
            .config(velocity_bounds(params), rng::derive_seed(self.seed, &[OUTER_TAG]), self.sigma_cap)
    }

    /// Seed of the island run by outer particle `particle` at `generation`.
    pub fn island_seed(&self, particle: usize, generation: usize) -> u64 {
        rng::derive_seed(self.seed, &[particle as u64, generation as u64])
    }

    /// Total number of formation evaluations.
    pub fn evaluations(&self) -> u64 {
        let islands = (self.outer.population * (self.outer.iterations + 1)) as u64;
        islands * (self.inner.population * (self.inner.iterations + 1)) as u64
    }
}

struct Island {
    formation: Vec<f64>,
    evaluation: Evaluation,
    worst: WorstFeasible,
    trace: Vec<f64>,
}

fn run_island(
    params: &ScenarioParams,
    config: &CoevolutionConfig,
    particle: usize,
    generation: usize,
    v_y: f64,
    worst: WorstFeasible,
    warm: Option<&[f64]>,
) -> Island {
    let inner = config
        .inner
        .config(formation_bounds(params), config.island_seed(particle, generation), config.sigma_cap);
    let objective = |x: &[f64]| evaluate_formation(x, v_y, params);
    let PsoOutcome {
        best_position,
        best,
        worst,
        trace,
        ..
    } = pso::run_from(&inner, &objective, worst, warm);
    let formation = Formation::from_interleaved(&best_position);
    let evaluation = match power_check(&formation, v_y, params) {
        Ok((ok, g, _)) => compose_power(best, ok, g),
        Err(err) => {
            log::debug!("island {particle}/{generation}: {err}");
            Evaluation::unevaluable()
        }
    };
    Island {
        formation: best_position,
        evaluation,
        worst,
        trace: trace.iter().map(|t| t.best_fitness).collect(),
    }
}

/// Runs the co-evolutionary planner on `params`.
pub fn solve(params: &ScenarioParams, config: &CoevolutionConfig) -> Result<Solution, SolveError> {
    params.validate()?;
    config.validate(params)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count)
        .build()
        .map_err(|e| SolveError::Pool(e.to_string()))?;

    let outer_cfg = config.outer_config(params);
    let mut outer = pso::Swarm::new(&outer_cfg, WorstFeasible::new(config.sigma_cap));
    let population = outer_cfg.population;
    let mut recorder = TraceRecorder::new(params, config.wall_clock);
    let mut islands_log = Vec::new();
    let mut previous: Vec<Option<Vec<f64>>> = vec![None; population];
    let mut associated: Vec<Vec<f64>> = vec![Vec::new(); population];

    for generation in 0..=outer_cfg.iterations {
        if generation > 0 {
            outer.advance(&outer_cfg);
        }
        let snapshot = outer.worst;
        let velocities: Vec<f64> = outer.positions.iter().map(|p| p[0]).collect();
        let islands: Vec<Island> = pool.install(|| {
            (0..population)
                .into_par_iter()
                .map(|d| {
                    let warm = if config.warm_start { previous[d].as_deref() } else { None };
                    run_island(params, config, d, generation, velocities[d], snapshot, warm)
                })
                .collect()
        });

        for island in &islands {
            outer.worst.merge(&island.worst);
        }
        let improved = outer.absorb(islands.iter().map(|i| i.evaluation).collect());
        for (d, island) in islands.iter().enumerate() {
            if improved.local[d] {
                associated[d] = island.formation.clone();
            }
        }
        if config.record_all_islands || generation == outer_cfg.iterations {
            islands_log.extend(islands.iter().enumerate().map(|(d, i)| IslandTrace {
                generation,
                particle: d,
                v_y: velocities[d],
                best_fitness: i.trace.clone(),
            }));
        }
        for (d, island) in islands.into_iter().enumerate() {
            previous[d] = Some(island.formation);
        }

        let g = outer.global_index;
        recorder.record(
            generation,
            &associated[g],
            outer.local_best[g][0],
            outer.global_best_eval(),
            outer.global_best_fitness(),
        );
        log::debug!(
            "generation {generation}: best fitness {:.6} at v_y {:.4}",
            outer.global_best_fitness(),
            outer.local_best[g][0]
        );
    }

    let g = outer.global_index;
    let solution = finish(
        SolverKind::Coevolution,
        config.seed,
        &associated[g],
        outer.local_best[g][0],
        outer.global_best_fitness(),
        config.evaluations(),
        recorder.rows,
        islands_log,
        params,
    )?;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> (ScenarioParams, CoevolutionConfig) {
        let params = ScenarioParams::default_with_uavs(3);
        let mut config = CoevolutionConfig::with_budget(12, 10, 3, 2);
        config.seed = 5;
        (params, config)
    }

    #[test]
    fn outer_best_never_worsens() {
        let (params, config) = tiny();
        let s = solve(&params, &config).unwrap();
        assert_eq!(s.trace.len(), 3);
        for w in s.trace.windows(2) {
            assert!(w[1].best_fitness <= w[0].best_fitness);
        }
        assert_eq!(s.fitness, s.trace.last().unwrap().best_fitness);
        assert_eq!(s.islands.len(), 3);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let (params, mut config) = tiny();
        let a = solve(&params, &config).unwrap();
        config.worker_count = 3;
        let b = solve(&params, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_workers_rejected() {
        let (params, mut config) = tiny();
        config.worker_count = 0;
        assert!(matches!(solve(&params, &config), Err(SolveError::Config(_))));
    }
}

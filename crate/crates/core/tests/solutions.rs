//! Solver outputs re-checked constraint by constraint from raw quantities.

use insar_swarm::baselines::{cga_solve, sa_solve, CgaConfig, SaConfig};
use insar_swarm::coevolution::{self, CoevolutionConfig};
use insar_swarm::comms::{gs_distances, required_rate, throughput, total_energy};
use insar_swarm::model::{baseline_geometry, height_of_ambiguity, look_angle_and_range, swath_and_coverage};
use insar_swarm::params::ScenarioParams;
use insar_swarm::solution::{Solution, TraceRow};

fn recheck(s: &Solution, p: &ScenarioParams) -> Vec<&'static str> {
    let l = &p.limits;
    let q = s.plan.formation.positions();
    let v = s.plan.v_y;
    let mut broken = Vec::new();
    let tol = 1e-9;
    if !q.iter().all(|q| q.z >= l.altitude_min && q.z <= l.altitude_max) {
        broken.push("altitude");
    }
    let thetas: Vec<f64> = q.iter().map(|q| look_angle_and_range(*q, p.target_x).unwrap().0).collect();
    if !thetas.iter().all(|t| *t >= l.look_angle_min - tol && *t <= l.look_angle_max + tol) {
        broken.push("look angle");
    }
    if !(l.velocity_min..=l.velocity_max).contains(&v) {
        broken.push("velocity");
    }
    if !s.plan.powers.values().iter().all(|&x| x >= 0.0 && x <= p.comm_power_max) {
        broken.push("power cap");
    }
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            if q[i].distance(&q[j]) < l.safety_distance {
                broken.push("safety distance");
            }
        }
    }
    let (_, coverage) = swath_and_coverage(&s.plan.formation, v, p).unwrap();
    if coverage < l.coverage_min {
        broken.push("coverage");
    }
    for &(i, j) in &p.phase_pairs {
        let b = baseline_geometry(q[i], q[j], p.target_x).unwrap();
        let (theta, r) = look_angle_and_range(q[i], p.target_x).unwrap();
        if height_of_ambiguity(theta, r, b.perpendicular, p.wavelength) < l.hoa_min {
            broken.push("height of ambiguity");
        }
    }
    let d = gs_distances(&s.plan.formation, v, p).unwrap();
    for i in 0..q.len() {
        let r_min = required_rate(q[i], p).unwrap();
        for n in 0..p.slot_count {
            let r = throughput(s.plan.powers.get(i, n), d.get(i, n), p.comm_bandwidth[i], p.channel_gain[i]);
            if r < r_min * (1.0 - 1e-9) {
                broken.push("rate");
            }
        }
    }
    let energy = total_energy(&s.plan.powers, v, p).unwrap();
    if energy.iter().any(|&e| e > p.energy_max) {
        broken.push("energy");
    }
    broken.dedup();
    broken
}

/// The penalty ranks any feasible plan above any infeasible one and
/// infeasible plans by total violation. The best-so-far must never drop in
/// that order, even though its numeric fitness moves with the worst-feasible
/// reference while nothing feasible has been kept.
fn assert_best_never_worsens(s: &Solution) {
    let violation = |r: &TraceRow| r.g2 + r.g5 + r.g6 + r.g7 + r.g8 + r.g10 + r.g11;
    for w in s.trace.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        match (a.feasible, b.feasible) {
            (true, false) => panic!("{} lost feasibility at generation {}", s.solver, b.generation),
            (true, true) => assert!(b.sigma_h <= a.sigma_h, "{} generation {}", s.solver, b.generation),
            (false, false) => assert!(
                violation(b) <= violation(a) * (1.0 + 1e-12) || !violation(a).is_finite(),
                "{} generation {}",
                s.solver,
                b.generation
            ),
            (false, true) => {}
        }
        if a.feasible && b.feasible {
            assert!(b.best_fitness <= a.best_fitness);
        }
    }
}

fn small_params() -> ScenarioParams {
    ScenarioParams::default_with_uavs(3)
}

#[test]
fn coevolution_solutions_pass_independent_checks() {
    let p = small_params();
    for seed in 1..=4 {
        let mut config = CoevolutionConfig::with_budget(20, 20, 4, 4);
        config.seed = seed;
        let s = coevolution::solve(&p, &config).unwrap();
        let broken = recheck(&s, &p);
        assert_eq!(s.feasible, broken.is_empty(), "seed {seed}: {broken:?}");
        if s.feasible {
            assert_eq!(s.fitness, s.sigma_h());
        }
        assert_best_never_worsens(&s);
        assert_eq!(s.trace.last().unwrap().best_fitness, s.fitness);
    }
}

#[test]
fn baseline_solutions_pass_independent_checks() {
    let p = small_params();
    for seed in 1..=4 {
        let cga = cga_solve(
            &p,
            &CgaConfig {
                population: 60,
                generations: 40,
                seed,
                ..CgaConfig::default()
            },
        )
        .unwrap();
        let sa = sa_solve(
            &p,
            &SaConfig {
                iterations: 1500,
                seed,
                ..SaConfig::default()
            },
        )
        .unwrap();
        for s in [cga, sa] {
            let broken = recheck(&s, &p);
            assert_eq!(s.feasible, broken.is_empty(), "{} seed {seed}: {broken:?}", s.solver);
            assert_eq!(s.trace.last().unwrap().best_fitness, s.fitness);
            assert_best_never_worsens(&s);
        }
    }
}

#[test]
fn worker_count_does_not_change_the_solution() {
    let p = small_params();
    let mut config = CoevolutionConfig::with_budget(15, 10, 5, 3);
    config.seed = 42;
    config.record_all_islands = true;
    config.worker_count = 1;
    let a = coevolution::solve(&p, &config).unwrap();
    config.worker_count = 5;
    let b = coevolution::solve(&p, &config).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.islands, b.islands);
    assert_eq!(a.plan, b.plan);
}

#[test]
fn island_trace_covers_every_generation() {
    let p = small_params();
    let mut config = CoevolutionConfig::with_budget(10, 5, 3, 2);
    config.record_all_islands = true;
    let s = coevolution::solve(&p, &config).unwrap();
    assert_eq!(s.islands.len(), 3 * 3);
    assert!(s.islands.iter().all(|i| i.best_fitness.len() == 6));
}

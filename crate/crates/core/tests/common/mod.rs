//! Helpers shared by several integration test targets.
#![allow(dead_code)]

use insar_swarm::comms::{self, gs_distances, propulsion_power, required_rate};
use insar_swarm::model::{Formation, Position};
use insar_swarm::params::ScenarioParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small random power-allocation problem.
#[derive(Debug, Clone)]
pub struct PowerInstance {
    pub params: ScenarioParams,
    pub formation: Formation,
    pub v_y: f64,
}

pub fn power_instance(seed: u64) -> PowerInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uavs = rng.random_range(1..=4usize);
    let slots = rng.random_range(1..=8usize);
    let mut p = ScenarioParams::default_with_uavs(uavs);
    p.slot_count = slots;
    p.slot_duration = rng.random_range(0.5..2.0);
    p.ground_station = [
        rng.random_range(-150.0..150.0),
        rng.random_range(0.0..100.0),
        rng.random_range(0.0..50.0),
    ];
    p.comm_power_max = rng.random_range(0.05..10.0);
    for i in 0..uavs {
        p.comm_bandwidth[i] = rng.random_range(2e7..2e9);
        p.channel_gain[i] = 10f64.powf(rng.random_range(1.0..3.0));
    }
    let positions = (0..uavs)
        .map(|_| {
            let theta = rng.random_range(p.limits.look_angle_min..p.limits.look_angle_max);
            let z = rng.random_range(5.0..100.0);
            Position::new(p.target_x - z * theta.tan(), z)
        })
        .collect();
    let v_y = rng.random_range(p.limits.velocity_min..p.limits.velocity_max);
    // energy budget spread around what flight, radar and a mid-range link need
    let t = p.mission_time();
    let base = t * (propulsion_power(v_y, &p.propulsion) + p.radar_power[0]);
    p.energy_max = base + t * p.comm_power_max * rng.random_range(-0.1..0.6);
    PowerInstance {
        params: p,
        formation: Formation::new(positions),
        v_y,
    }
}

fn rate(power: f64, d: f64, bandwidth: f64, gain: f64) -> f64 {
    bandwidth * (1.0 + power * gain / (d * d)).log2()
}

/// Feasibility on the power grid `{k * P_max / m}`: some schedule on the grid
/// meets every slot's rate, the cap and every UAV's energy budget.
pub fn grid_feasible(inst: &PowerInstance, m: u64) -> bool {
    let p = &inst.params;
    let d = gs_distances(&inst.formation, inst.v_y, p).expect("distances");
    let t = p.mission_time();
    let prop = propulsion_power(inst.v_y, &p.propulsion);
    for (i, q) in inst.formation.positions().iter().enumerate() {
        let r_min = required_rate(*q, p).expect("rate");
        let mut energy = t * (prop + p.radar_power[i]);
        for n in 0..p.slot_count {
            let ok = |k: u64| rate(p.comm_power_max * k as f64 / m as f64, d.get(i, n), p.comm_bandwidth[i], p.channel_gain[i]) >= r_min;
            if !ok(m) {
                return false;
            }
            // rate is monotone in power, so the cheapest grid point is found by bisection
            let (mut lo, mut hi) = (0u64, m);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let k = if ok(lo) { lo } else { hi };
            energy += p.slot_duration * p.comm_power_max * k as f64 / m as f64;
        }
        if energy > p.energy_max {
            return false;
        }
    }
    true
}

/// Grid verdict refined until it no longer changes over the last levels.
pub fn brute_force_feasible(inst: &PowerInstance) -> (bool, bool) {
    let verdicts: Vec<bool> = (8..=44).map(|e| grid_feasible(inst, 1u64 << e)).collect();
    let last = *verdicts.last().unwrap();
    let stable = verdicts[verdicts.len() - 8..].iter().all(|&v| v == last);
    (last, stable)
}

/// Outcome of checking one instance against the closed-form allocation.
#[derive(Debug)]
pub struct PowerCheck {
    pub agree: bool,
    pub stable: bool,
    pub closed_form: bool,
    /// Worst relative rate mismatch over the returned plan.
    pub rate_error: f64,
    pub cap_ok: bool,
    pub energy_ok: bool,
}

pub fn check_power_instance(inst: &PowerInstance) -> PowerCheck {
    let p = &inst.params;
    let plan = comms::allocate_power(&inst.formation, inst.v_y, p).expect("plan");
    let (brute, stable) = brute_force_feasible(inst);
    let d = gs_distances(&inst.formation, inst.v_y, p).unwrap();
    let mut rate_error = 0.0f64;
    for (i, q) in inst.formation.positions().iter().enumerate() {
        let r_min = required_rate(*q, p).unwrap();
        for n in 0..p.slot_count {
            let r = rate(plan.powers.get(i, n), d.get(i, n), p.comm_bandwidth[i], p.channel_gain[i]);
            rate_error = rate_error.max((r - r_min).abs() / r_min);
        }
    }
    let (cap_ok, energy_ok) = if plan.feasible {
        let energy = comms::total_energy(&plan.powers, inst.v_y, p).unwrap();
        (
            plan.powers.values().iter().all(|&x| x <= p.comm_power_max),
            energy.iter().all(|&e| e <= p.energy_max),
        )
    } else {
        (true, true)
    };
    PowerCheck {
        agree: plan.feasible == brute,
        stable,
        closed_form: plan.feasible,
        rate_error,
        cap_ok,
        energy_ok,
    }
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Sphere run stepping the swarm by hand so every position can be inspected.
pub struct SphereRun {
    pub best: f64,
    pub out_of_bounds: usize,
    pub monotone: bool,
}

pub fn sphere_run(seed: u64, population: usize, iterations: usize) -> SphereRun {
    use insar_swarm::objective::{SearchBox, WorstFeasible};
    use insar_swarm::pso::{self, PsoConfig, Unconstrained};

    let bounds = SearchBox::uniform(5, -5.0, 5.0);
    let config = PsoConfig::new(bounds.clone(), population, iterations, seed);
    let objective = Unconstrained(sphere);
    let mut swarm = pso::init(&config, &objective, WorstFeasible::new(config.sigma_cap));
    let count = |s: &pso::Swarm| s.positions.iter().filter(|p| !bounds.contains(p)).count();
    let mut out_of_bounds = count(&swarm);
    let mut monotone = true;
    let mut last = swarm.global_best_fitness();
    for _ in 0..iterations {
        pso::step(&mut swarm, &objective, &config);
        out_of_bounds += count(&swarm);
        let now = swarm.global_best_fitness();
        monotone &= now <= last;
        last = now;
    }
    SphereRun {
        best: last,
        out_of_bounds,
        monotone,
    }
}

//! Plans a five-UAV formation for the default scenario.
//!
//! cargo run --release --example coevolution_plan -- [seed] [D1 K1 D2 K2]

use std::time::Instant;

use insar_swarm::coevolution::{self, CoevolutionConfig};
use insar_swarm::params::ScenarioParams;

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let seed = args.first().copied().unwrap_or(1);
    let budget: Vec<usize> = args.iter().skip(1).map(|&a| a as usize).collect();
    let (d1, k1, d2, k2) = match budget.as_slice() {
        [d1, k1, d2, k2] => (*d1, *k1, *d2, *k2),
        _ => (100, 100, 16, 20),
    };

    let params = ScenarioParams::default_mission();
    let mut config = CoevolutionConfig::with_budget(d1, k1, d2, k2);
    config.seed = seed;
    config.worker_count = std::thread::available_parallelism().map_or(1, |n| n.get());

    let start = Instant::now();
    let s = coevolution::solve(&params, &config).expect("valid configuration");
    println!("seed {seed}, budget D1={d1} K1={k1} D2={d2} K2={k2}, {:.1} s", start.elapsed().as_secs_f64());
    println!("feasible {}  fitness {:.5} m  v_y {:.3} m/s", s.feasible, s.fitness, s.plan.v_y);
    for (i, q) in s.plan.formation.positions().iter().enumerate() {
        println!("  UAV {i}: x {:8.3} m  z {:7.3} m", q.x, q.z);
    }
    println!("pair     b (m)  b_perp  h_amb   gamma  sigma_h");
    for p in &s.report.per_pair {
        println!(
            "{}-{}  {:8.3} {:7.3} {:6.2} {:7.4} {:8.4}",
            p.i, p.j, p.baseline, p.b_perp, p.hoa, p.gamma, p.sigma_h
        );
    }
    println!("coverage {:.0} m^2, max power {:.3} W", s.report.coverage, s.plan.powers.max());
}

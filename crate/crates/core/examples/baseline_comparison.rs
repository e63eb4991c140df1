//! Paired-seed comparison of the co-evolutionary planner against the
//! genetic-algorithm and annealing baselines on the default scenario.
//!
//! cargo run --release --example baseline_comparison -- [seeds]

use std::time::Instant;

use insar_swarm::baselines::{cga_solve, sa_solve, CgaConfig, SaConfig};
use insar_swarm::coevolution::{self, CoevolutionConfig};
use insar_swarm::params::ScenarioParams;
use insar_swarm::solution::Solution;

fn line(name: &str, s: &Solution, secs: f64) -> String {
    format!(
        "{name:>11}: fitness {:9.5}  feasible {:5}  v_y {:5.2}  ({secs:.1} s)  g2 {:.2e} g5 {:.2e} g6 {:.2e} g7 {:.2e} g10 {:.2e} g11 {:.2e}",
        s.fitness, s.feasible, s.plan.v_y, s.report.g2, s.report.g5, s.report.g6, s.report.g7, s.report.g10, s.report.g11
    )
}

fn main() {
    let seeds: u64 = std::env::args().nth(1).map_or(3, |a| a.parse().expect("seed count"));
    let params = ScenarioParams::default_mission();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut wins = 0;
    for seed in 1..=seeds {
        let mut co = CoevolutionConfig::with_budget(100, 100, 16, 20);
        co.seed = seed;
        co.worker_count = workers;
        let t = Instant::now();
        let a = coevolution::solve(&params, &co).expect("coevolution");
        let ta = t.elapsed().as_secs_f64();

        let t = Instant::now();
        let b = cga_solve(&params, &CgaConfig { seed, parallel: true, ..CgaConfig::default() }).expect("cga");
        let tb = t.elapsed().as_secs_f64();

        let t = Instant::now();
        let c = sa_solve(&params, &SaConfig { seed, ..SaConfig::default() }).expect("sa");
        let tc = t.elapsed().as_secs_f64();

        println!("seed {seed}");
        println!("{}", line("coevolution", &a, ta));
        println!("{}", line("cga", &b, tb));
        println!("{}", line("sa", &c, tc));
        if a.fitness <= b.fitness && a.fitness <= c.fitness {
            wins += 1;
        }
    }
    println!("coevolution best or tied in {wins}/{seeds} pairs");
}

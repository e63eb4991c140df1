//! The particle swarm on its own: a constrained toy problem solved with the
//! same penalty the planner uses.
//!
//! Minimize (x - 2)^2 + (y - 1)^2 subject to x + y <= 2 on [-5, 5]^2.
//! The optimum is (1.5, 0.5) with value 0.5.
//!
//! cargo run --example pso_engine -- [seed]

use insar_swarm::objective::{Evaluation, SearchBox};
use insar_swarm::pso::{self, PsoConfig};

fn main() {
    let seed: u64 = std::env::args().nth(1).map_or(1, |a| a.parse().expect("seed"));
    let objective = |x: &[f64]| {
        let f = (x[0] - 2.0).powi(2) + (x[1] - 1.0).powi(2);
        let g = (x[0] + x[1] - 2.0).max(0.0);
        if g == 0.0 {
            Evaluation::feasible(f)
        } else {
            Evaluation::infeasible(f, g)
        }
    };
    let config = PsoConfig::new(SearchBox::uniform(2, -5.0, 5.0), 40, 150, seed);
    let out = pso::run(&config, &objective);
    for t in out.trace.iter().step_by(25) {
        println!("iter {:3}  best {:.6}  feasible {}", t.iteration, t.best_fitness, t.feasible);
    }
    println!(
        "best ({:.4}, {:.4}) value {:.6}",
        out.best_position[0], out.best_position[1], out.best_fitness
    );
}

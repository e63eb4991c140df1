//! Benchmark solvers over the joint vector `(x1, z1, ..., xI, zI, v_y)`,
//! scored through the same evaluation path as the co-evolutionary planner.

pub mod cga;
pub mod sa;

use serde::Serialize;

use crate::objective::{Evaluation, WorstFeasible};
use crate::pso::TracePoint;

pub use cga::{cga_minimize, cga_solve, CgaConfig};
pub use sa::{sa_minimize, sa_solve, SaConfig};

/// Result of a generic baseline run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineOutcome {
    pub best_position: Vec<f64>,
    pub best: Evaluation,
    pub best_fitness: f64,
    pub worst: WorstFeasible,
    pub evaluations: u64,
    pub trace: Vec<TracePoint>,
}

/// Folds `x` back into `[lo, hi]` by mirror reflection at the walls.
pub fn reflect_into(x: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    if width <= 0.0 {
        return lo;
    }
    let mut y = (x - lo).rem_euclid(2.0 * width);
    if y > width {
        y = 2.0 * width - y;
    }
    lo + y
}

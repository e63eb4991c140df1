//! Sweeps the minimum height of ambiguity with a small budget and prints the
//! summary table; per-run artifacts go under the output directory.
//!
//! cargo run --release --example hoa_sweep -- [out_dir]

use std::path::PathBuf;

use insar_swarm::experiment::{run_sweep, SweepSpec};
use insar_swarm::scenario::Scenario;
use insar_swarm::solution::SolverKind;

const SCENARIO: &str = include_str!("scenarios/quick.toml");

fn main() {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("hoa_sweep"), PathBuf::from);
    let base = Scenario::from_toml_str(SCENARIO).expect("bundled scenario parses");
    let spec = SweepSpec {
        variable: "h_amb_min".into(),
        values: vec!["0.5".into(), "1.2".into(), "2".into(), "3".into()],
        solvers: vec![SolverKind::Coevolution],
        seeds: vec![1, 2, 3],
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let outcome = run_sweep(&base, &spec, &out, jobs).expect("sweep runs");
    println!("h_amb_min  feasible  median sigma_h (m)  min      max");
    for r in &outcome.summary {
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        println!(
            "{:>9}  {}/{}       {:>8}            {:>7}  {:>7}",
            r.value,
            r.feasible,
            r.runs,
            f(r.median_sigma_h),
            f(r.min_sigma_h),
            f(r.max_sigma_h)
        );
    }
    println!("artifacts in {}", out.display());
}

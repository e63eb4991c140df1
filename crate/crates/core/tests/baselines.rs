mod common;

use common::{median, rosenbrock, sphere};
use insar_swarm::baselines::{cga_minimize, reflect_into, sa_minimize, CgaConfig, SaConfig};
use insar_swarm::objective::SearchBox;
use insar_swarm::pso::Unconstrained;
use proptest::prelude::*;

#[test]
fn genetic_algorithm_on_sphere() {
    let bounds = SearchBox::uniform(5, -5.0, 5.0);
    let best: Vec<f64> = (0..20)
        .map(|seed| {
            let config = CgaConfig {
                population: 100,
                generations: 200,
                seed,
                ..CgaConfig::default()
            };
            cga_minimize(&config, &bounds, &Unconstrained(sphere), |_, _, _, _| {}).best_fitness
        })
        .collect();
    let m = median(best);
    assert!(m <= 1e-2, "median {m}");
}

#[test]
fn annealing_on_rosenbrock() {
    let bounds = SearchBox::uniform(2, -2.0, 2.0);
    let best: Vec<f64> = (0..20)
        .map(|seed| {
            let config = SaConfig {
                seed,
                ..SaConfig::default()
            };
            sa_minimize(&config, &bounds, &Unconstrained(rosenbrock), |_, _, _, _| {}).best_fitness
        })
        .collect();
    let m = median(best);
    assert!(m <= 0.1, "median {m}");
}

#[test]
fn baseline_traces_are_monotone() {
    let bounds = SearchBox::uniform(3, -4.0, 4.0);
    let cga = cga_minimize(
        &CgaConfig {
            population: 50,
            generations: 60,
            seed: 9,
            ..CgaConfig::default()
        },
        &bounds,
        &Unconstrained(rosenbrock),
        |_, _, _, _| {},
    );
    assert_eq!(cga.trace.len(), 61);
    let sa = sa_minimize(&SaConfig { iterations: 800, seed: 9, ..SaConfig::default() }, &bounds, &Unconstrained(rosenbrock), |_, _, _, _| {});
    for trace in [&cga.trace, &sa.trace] {
        assert!(trace.windows(2).all(|w| w[1].best_fitness <= w[0].best_fitness));
    }
}

#[test]
fn annealing_cools_as_one_over_k() {
    let c = SaConfig {
        initial_temperature: 3.0,
        ..SaConfig::default()
    };
    for k in 0..100 {
        assert_eq!(c.temperature(k), 3.0 / (k as f64 + 1.0));
    }
}

proptest! {
    #[test]
    fn reflection_lands_in_box(x in -1e3f64..1e3, lo in -10.0f64..10.0, width in 1e-3f64..50.0) {
        let y = reflect_into(x, lo, lo + width);
        prop_assert!(lo <= y && y <= lo + width);
    }

    #[test]
    fn reflection_keeps_inside_points(t in 0.0f64..=1.0, lo in -10.0f64..10.0, width in 1e-3f64..50.0) {
        let x = lo + t * width;
        prop_assert_eq!(reflect_into(x, lo, lo + width), x.min(lo + width));
    }
}

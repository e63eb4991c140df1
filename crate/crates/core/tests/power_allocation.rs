mod common;

use common::{check_power_instance, power_instance};
use insar_swarm::comms::{self, min_tx_power};
use insar_swarm::model::{Formation, Position};
use insar_swarm::params::ScenarioParams;
use proptest::prelude::*;

#[test]
fn closed_form_matches_grid_search_on_fixed_instances() {
    let mut feasible = 0;
    for seed in 0..200 {
        let inst = power_instance(seed);
        let c = check_power_instance(&inst);
        assert!(c.stable, "grid verdict did not settle for instance {seed}");
        assert!(c.agree, "instance {seed}: closed form {} disagrees", c.closed_form);
        assert!(c.rate_error <= 1e-9, "instance {seed}: rate error {}", c.rate_error);
        assert!(c.cap_ok && c.energy_ok, "instance {seed}");
        feasible += c.closed_form as usize;
    }
    // both verdicts must be exercised
    assert!(feasible > 20 && feasible < 180, "{feasible} feasible of 200");
}

#[test]
fn cap_excess_reports_g10() {
    let mut p = ScenarioParams::default_with_uavs(1);
    p.slot_count = 3;
    p.comm_power_max = 1e-6;
    let f = Formation::new(vec![Position::new(-30.0, 50.0)]);
    let plan = comms::allocate_power(&f, 4.0, &p).unwrap();
    assert!(!plan.feasible);
    assert!(plan.violations.unwrap().g10 > 0.0);
}

#[test]
fn zero_energy_budget_reports_g11() {
    let mut p = ScenarioParams::default_with_uavs(2);
    p.energy_max = 0.0;
    let f = Formation::new(vec![Position::new(-30.0, 50.0), Position::new(-26.0, 50.0)]);
    let plan = comms::allocate_power(&f, 4.0, &p).unwrap();
    assert!(!plan.feasible);
    assert!(plan.violations.unwrap().g11 > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_instances_agree(seed in 1000u64..1_000_000) {
        let c = check_power_instance(&power_instance(seed));
        prop_assert!(c.stable);
        prop_assert!(c.agree);
        prop_assert!(c.rate_error <= 1e-9);
        prop_assert!(c.cap_ok && c.energy_ok);
    }

    #[test]
    fn minimum_power_grows_with_distance(d in 1.0f64..1000.0, k in 1.01f64..10.0, rate in 1e4f64..1e8) {
        prop_assert!(min_tx_power(d * k, rate, 1e9, 100.0) > min_tx_power(d, rate, 1e9, 100.0));
    }
}

//! Closed-form checks of the sensing and link model. Reference values were
//! produced by tests/oracle/closed_form.py and frozen here.

use approx::assert_relative_eq;
use insar_swarm::comms::{self, min_tx_power, propulsion_power, required_rate, throughput};
use insar_swarm::model::{
    baseline_decorrelation, baseline_geometry, fused_height_error, height_of_ambiguity, look_angle_and_range,
    pair_height_error, snr, snr_decorrelation, swath_and_coverage, swath_width, Formation, Position,
};
use insar_swarm::objective::range_bounds;
use insar_swarm::params::{PropulsionParams, ScenarioParams};
use proptest::prelude::*;

const REL: f64 = 1e-6;

fn master_pair() -> (ScenarioParams, Formation) {
    let p = ScenarioParams::default_with_uavs(2);
    let f = Formation::new(vec![Position::new(-30.0, 50.0), Position::new(-28.0, 50.0)]);
    (p, f)
}

#[test]
fn look_angle_of_master() {
    let (theta, r) = look_angle_and_range(Position::new(-30.0, 50.0), 20.0).unwrap();
    assert_relative_eq!(theta, 0.7853981633974483, max_relative = 1e-12);
    assert_relative_eq!(r, 70.71067811865476, max_relative = 1e-12);
}

#[test]
fn range_box_from_look_angle_limits() {
    let (lo, hi) = range_bounds(&ScenarioParams::default_mission());
    assert_relative_eq!(lo, -93.82761134900284, max_relative = REL);
    assert_relative_eq!(hi, 19.23985774747691, max_relative = REL);
    let (theta, _) = look_angle_and_range(Position::new(19.24, 1.0), 20.0).unwrap();
    assert_relative_eq!(theta.to_degrees(), 37.234833981574724, max_relative = REL);
}

#[test]
fn horizontal_baseline_projection() {
    let b = baseline_geometry(Position::new(-30.0, 50.0), Position::new(-28.0, 50.0), 20.0).unwrap();
    assert_relative_eq!(b.length, 2.0, max_relative = 1e-12);
    assert_relative_eq!(b.perpendicular, 1.4142135623730951, max_relative = REL);
}

#[test]
fn swath_and_total_coverage() {
    let (p, f) = master_pair();
    let (theta, r) = look_angle_and_range(f.positions()[0], p.target_x).unwrap();
    assert_relative_eq!(swath_width(theta, r, p.elevation_beamwidth), 69.81317007977317, max_relative = REL);
    let same = Formation::new(vec![Position::new(-30.0, 50.0), Position::new(-30.0, 50.0)]);
    let (_, coverage) = swath_and_coverage(&same, 4.2, &p).unwrap();
    assert_relative_eq!(coverage, 58643.06286700947, max_relative = REL);
}

#[test]
fn master_snr_link_budget() {
    let (p, f) = master_pair();
    let s = snr(&f, 4.2, &p).unwrap();
    assert_relative_eq!(s[0], 942.3690839211553, max_relative = REL);
}

#[test]
fn snr_coherence_of_unit_snr_is_one_half() {
    assert_eq!(snr_decorrelation(1.0, 1.0), 0.5);
}

#[test]
fn equal_look_angles_are_fully_coherent() {
    for deg in [37.5, 40.0, 45.0, 48.0] {
        let t = f64::to_radians(deg);
        assert!((baseline_decorrelation(t, t, 1.2) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn baseline_coherence_worked_value() {
    let g = baseline_decorrelation(30f64.to_radians(), 40f64.to_radians(), 1.2);
    assert_relative_eq!(g, 0.9020000855598161, max_relative = REL);
    assert_relative_eq!(g, 0.90200, max_relative = 1e-5);
}

#[test]
fn phase_and_height_error_worked_values() {
    let (sigma_phi, sigma_h) = pair_height_error(0.9, 4.0, 3.0).unwrap();
    assert_relative_eq!(sigma_phi, 0.17123372230469375, max_relative = REL);
    assert_relative_eq!(sigma_h, 0.08175807998645082, max_relative = REL);
    assert_relative_eq!(sigma_phi, 0.171234, max_relative = 1e-5);
    assert_relative_eq!(sigma_h, 0.081758, max_relative = 1e-5);
}

#[test]
fn fusion_of_two_unequal_pairs() {
    assert_relative_eq!(fused_height_error(&[0.05, 0.5]).unwrap(), 0.04975185951049946, max_relative = REL);
}

#[test]
fn height_of_ambiguity_worked_value() {
    let (theta, r) = look_angle_and_range(Position::new(-30.0, 50.0), 20.0).unwrap();
    assert_relative_eq!(height_of_ambiguity(theta, r, 2.0, 0.12), 3.0, max_relative = 1e-12);
}

#[test]
fn sensing_data_rate() {
    let p = ScenarioParams::default_mission();
    assert_relative_eq!(required_rate(Position::new(-30.0, 50.0), &p).unwrap(), 3727395.797642128, max_relative = REL);
}

#[test]
fn ground_station_distance_in_last_slot() {
    let (p, f) = master_pair();
    let d = comms::gs_distances(&f, 4.2, &p).unwrap();
    assert_relative_eq!(d.get(0, 199), 693.5031650973195, max_relative = REL);
}

#[test]
fn propulsion_power_worked_values() {
    let prop = PropulsionParams::canonical();
    assert_relative_eq!(propulsion_power(10.0, &prop), 126.0336867737212, max_relative = REL);
    assert_relative_eq!(propulsion_power(0.0, &prop), 168.49, max_relative = 1e-12);
}

proptest! {
    #[test]
    fn fusion_of_equal_errors(sigma in 1e-4f64..10.0, k in 1usize..64) {
        let fused = fused_height_error(&vec![sigma; k]).unwrap();
        prop_assert!((fused - sigma / (k as f64).sqrt()).abs() <= 1e-12 * sigma);
    }

    #[test]
    fn fusion_never_exceeds_best_pair(errs in prop::collection::vec(1e-3f64..5.0, 1..12)) {
        let fused = fused_height_error(&errs).unwrap();
        let best = errs.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(fused <= best * (1.0 + 1e-12));
    }

    #[test]
    fn height_of_ambiguity_scales_inversely(
        theta in 0.3f64..1.3,
        r in 10.0f64..500.0,
        b in 0.1f64..50.0,
        k in prop::sample::select(vec![0.25f64, 0.5, 2.0, 4.0, 8.0]),
    ) {
        let h1 = height_of_ambiguity(theta, r, b, 0.12);
        let hk = height_of_ambiguity(theta, r, b * k, 0.12);
        prop_assert_eq!(h1, hk * k);
    }

    #[test]
    fn coherence_terms_stay_in_unit_interval(
        a in 1e-3f64..1e6,
        b in 1e-3f64..1e6,
        ti in 0.5f64..1.0,
        tj in 0.5f64..1.0,
        bp in 0.05f64..1.95,
    ) {
        let g = snr_decorrelation(a, b);
        prop_assert!(g > 0.0 && g < 1.0);
        let r = baseline_decorrelation(ti, tj, bp);
        prop_assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn throughput_inverts_minimum_power(
        d in 1.0f64..2000.0,
        rate in 1e3f64..1e8,
        bw in 1e6f64..1e10,
        gain_db in 0.0f64..40.0,
    ) {
        let gain = 10f64.powf(gain_db / 10.0);
        let p = min_tx_power(d, rate, bw, gain);
        let back = throughput(p, d, bw, gain);
        prop_assert!((back - rate).abs() <= 1e-9 * rate, "{back} vs {rate}");
    }
}

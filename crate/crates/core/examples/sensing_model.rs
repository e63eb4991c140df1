//! Height-error budget of a hand-placed five-UAV formation, pair by pair.
//!
//! cargo run --example sensing_model -- [v_y]

use insar_swarm::model::{evaluate_sensing, Formation, Position};
use insar_swarm::params::ScenarioParams;

fn main() {
    let v_y: f64 = std::env::args().nth(1).map_or(4.2, |a| a.parse().expect("speed in m/s"));
    let params = ScenarioParams::default_mission();
    // a staggered column looking at the line x = 20 m
    let formation = Formation::new(vec![
        Position::new(-40.0, 60.0),
        Position::new(-42.0, 60.0),
        Position::new(-44.0, 62.5),
        Position::new(-39.0, 64.0),
        Position::new(-45.0, 67.0),
    ]);
    let s = evaluate_sensing(&formation, v_y, &params).expect("formation inside the model's domain");

    println!("v_y {v_y} m/s, coverage {:.0} m^2", s.coverage);
    println!("uav  theta (deg)  range (m)  swath (m)        SNR");
    for i in 0..formation.len() {
        println!(
            "{:>3}  {:11.3}  {:9.2}  {:9.2}  {:9.1}",
            i + 1,
            s.look_angles[i].to_degrees(),
            s.ranges[i],
            s.swaths[i],
            s.snr[i]
        );
    }
    println!("\npair  b_perp (m)  h_amb (m)  g_snr   g_rg    gamma  sigma_h (m)");
    for p in &s.pairs {
        println!(
            "{}-{}   {:9.3}  {:9.3}  {:.4}  {:.4}  {:.4}  {:10.4}",
            p.i + 1,
            p.j + 1,
            p.b_perp,
            p.hoa,
            p.gamma_snr,
            p.gamma_rg,
            p.gamma,
            p.sigma_h
        );
    }
    println!("\nfused sigma_h {:.4} m", s.sigma_h);
}

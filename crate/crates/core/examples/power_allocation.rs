//! Minimum offloading powers for one formation at several speeds, with the
//! cap and energy verdicts.
//!
//! cargo run --example power_allocation

use insar_swarm::comms::{self, propulsion_power};
use insar_swarm::model::{Formation, Position};
use insar_swarm::params::ScenarioParams;

fn main() {
    let params = ScenarioParams::default_mission();
    let formation = Formation::new(vec![
        Position::new(-40.0, 60.0),
        Position::new(-43.0, 63.0),
        Position::new(-46.5, 67.0),
        Position::new(-50.0, 70.5),
        Position::new(-47.0, 75.0),
    ]);
    println!("cap {:.3} W, energy budget {:.0} J per UAV", params.comm_power_max, params.energy_max);
    println!(" v_y   P_prop (W)  max eta (W)  energy UAV1 (kJ)  feasible  g10       g11");
    for v_y in [1.0, 2.0, 3.0, 4.2, 6.0, 8.0, 10.0, 12.0] {
        let plan = comms::allocate_power(&formation, v_y, &params).expect("valid geometry");
        let energy = comms::total_energy(&plan.powers, v_y, &params).expect("plan shape");
        let g = plan.violations.unwrap_or_default();
        println!(
            "{v_y:5.1}  {:10.2}  {:11.4}  {:16.2}  {:8}  {:.2e}  {:.2e}",
            propulsion_power(v_y, &params.propulsion),
            plan.powers.max(),
            energy[0] / 1e3,
            plan.feasible,
            g.g10,
            g.g11
        );
    }
}

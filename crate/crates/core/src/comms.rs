//! Air-to-ground offloading link, sensing data rate, propulsion power and
//! the closed-form minimum-power allocation.

use serde::Serialize;

use crate::error::ModelError;
use crate::model::{Formation, Position};
use crate::params::{PropulsionParams, ScenarioParams, SPEED_OF_LIGHT};

/// Dense row-major matrix indexed `(uav, slot)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl SlotMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for n in 0..cols {
                data.push(f(i, n));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Along-track coordinate of the swarm in slot `n` (zero-based).
pub fn along_track(n: usize, v_y: f64, params: &ScenarioParams) -> f64 {
    n as f64 * v_y * params.slot_duration
}

/// UAV-to-ground-station distances for every UAV and slot.
pub fn gs_distances(
    formation: &Formation,
    v_y: f64,
    params: &ScenarioParams,
) -> Result<SlotMatrix, ModelError> {
    let [gx, gy, gz] = params.ground_station;
    let d = SlotMatrix::from_fn(formation.len(), params.slot_count, |i, n| {
        let q = formation.positions()[i];
        let y = along_track(n, v_y, params);
        ((q.x - gx).powi(2) + (y - gy).powi(2) + (q.z - gz).powi(2)).sqrt()
    });
    for i in 0..d.rows() {
        if d.row(i).iter().any(|&dist| dist == 0.0) {
            return Err(ModelError::AtGroundStation { index: i });
        }
    }
    Ok(d)
}

/// Raw radar data rate a UAV must offload (bit/s).
pub fn required_rate(pos: Position, params: &ScenarioParams) -> Result<f64, ModelError> {
    if !(pos.z > 0.0) {
        return Err(ModelError::NonPositiveAltitude {
            index: 0,
            altitude: pos.z,
        });
    }
    let theta = ((params.target_x - pos.x) / pos.z).atan();
    let half = params.elevation_beamwidth / 2.0;
    if theta + half >= std::f64::consts::FRAC_PI_2 {
        return Err(ModelError::BeamBeyondHorizon { index: 0 });
    }
    let echo_window = SPEED_OF_LIGHT * params.pulse_duration + pos.z / (theta + half).cos()
        - pos.z / (theta - half).cos();
    Ok(params.bits_per_sample * params.pulse_bandwidth * params.prf / SPEED_OF_LIGHT * echo_window)
}

/// Smallest transmit power meeting `r_min` at distance `d` (W).
pub fn min_tx_power(d: f64, r_min: f64, bandwidth: f64, gain: f64) -> f64 {
    d * d / gain * ((r_min / bandwidth).exp2() - 1.0)
}

/// Free-space FDMA throughput (bit/s).
pub fn throughput(power: f64, d: f64, bandwidth: f64, gain: f64) -> f64 {
    bandwidth * (power * gain / (d * d)).ln_1p() / std::f64::consts::LN_2
}

/// Steady-flight rotary-wing propulsion power at speed `v` (W).
pub fn propulsion_power(v: f64, p: &PropulsionParams) -> f64 {
    let v2 = v * v;
    let v0_2 = p.induced_velocity * p.induced_velocity;
    let blade = p.profile_power * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed));
    // sqrt(1 + a^2) - a written without cancellation
    let a = v2 / (2.0 * v0_2);
    let inner = 1.0 / ((1.0 + a * a).sqrt() + a);
    let induced = p.induced_power * inner.sqrt();
    blade + induced + p.parasitic_coefficient() * v2 * v
}

/// Distances, required rates and minimum powers of one formation at one speed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkState {
    pub distances: SlotMatrix,
    pub required_rates: Vec<f64>,
    pub min_powers: SlotMatrix,
}

pub fn link_state(
    formation: &Formation,
    v_y: f64,
    params: &ScenarioParams,
) -> Result<LinkState, ModelError> {
    let distances = gs_distances(formation, v_y, params)?;
    let required_rates = formation
        .positions()
        .iter()
        .enumerate()
        .map(|(index, q)| {
            required_rate(*q, params).map_err(|e| match e {
                ModelError::NonPositiveAltitude { altitude, .. } => {
                    ModelError::NonPositiveAltitude { index, altitude }
                }
                ModelError::BeamBeyondHorizon { .. } => ModelError::BeamBeyondHorizon { index },
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let min_powers = SlotMatrix::from_fn(distances.rows(), distances.cols(), |i, n| {
        min_tx_power(
            distances.get(i, n),
            required_rates[i],
            params.comm_bandwidth[i],
            params.channel_gain[i],
        )
    });
    Ok(LinkState {
        distances,
        required_rates,
        min_powers,
    })
}

/// Power left for offloading per UAV over the mission, in the power domain:
/// `E_max / dt - N * P_prop - N * P_rad,i`.
pub fn offload_power_budget(uav: usize, v_y: f64, params: &ScenarioParams) -> f64 {
    let n = params.slot_count as f64;
    params.energy_max / params.slot_duration
        - n * propulsion_power(v_y, &params.propulsion)
        - n * params.radar_power[uav]
}

/// Hinge sums measuring how far the minimum powers violate the caps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PowerViolations {
    /// Instantaneous power cap excess.
    pub g10: f64,
    /// Energy budget excess.
    pub g11: f64,
}

impl PowerViolations {
    pub fn total(&self) -> f64 {
        self.g10 + self.g11
    }

    pub fn is_zero(&self) -> bool {
        self.g10 == 0.0 && self.g11 == 0.0
    }
}

/// Penalties of the minimum-power allocation.
///
/// `g10` sums `[eta - P_max]+` over all UAVs and slots; `g11` sums the
/// per-slot hinge `[eta - E_max/dt + N P_prop + N P_rad]+`.
pub fn power_violations(link: &LinkState, v_y: f64, params: &ScenarioParams) -> PowerViolations {
    let mut out = PowerViolations::default();
    for i in 0..link.min_powers.rows() {
        let budget = offload_power_budget(i, v_y, params);
        for &eta in link.min_powers.row(i) {
            out.g10 += (eta - params.comm_power_max).max(0.0);
            out.g11 += (eta - budget).max(0.0);
        }
    }
    out
}

/// Whether the minimum powers satisfy the per-slot cap and the aggregate energy budget.
pub fn minimum_powers_feasible(link: &LinkState, v_y: f64, params: &ScenarioParams) -> (bool, bool) {
    let mut cap_ok = true;
    let mut budget_ok = true;
    for i in 0..link.min_powers.rows() {
        let row = link.min_powers.row(i);
        cap_ok &= row.iter().all(|&eta| eta <= params.comm_power_max);
        budget_ok &= row.iter().sum::<f64>() <= offload_power_budget(i, v_y, params);
    }
    (cap_ok, budget_ok)
}

/// Communication power schedule of the swarm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerPlan {
    pub powers: SlotMatrix,
    pub feasible: bool,
    /// Present when the minimum powers break the caps.
    pub violations: Option<PowerViolations>,
}

impl PowerPlan {
    /// Plan built from the minimum powers of `link`.
    pub fn minimum(link: &LinkState, v_y: f64, params: &ScenarioParams) -> Self {
        let (cap_ok, budget_ok) = minimum_powers_feasible(link, v_y, params);
        let feasible = cap_ok && budget_ok;
        Self {
            powers: link.min_powers.clone(),
            feasible,
            violations: (!feasible).then(|| power_violations(link, v_y, params)),
        }
    }
}

/// Minimum-power allocation: feasible iff every `eta` respects the per-slot cap
/// and every UAV's summed `eta` fits its energy budget.
pub fn allocate_power(
    formation: &Formation,
    v_y: f64,
    params: &ScenarioParams,
) -> Result<PowerPlan, ModelError> {
    let link = link_state(formation, v_y, params)?;
    Ok(PowerPlan::minimum(&link, v_y, params))
}

/// Energy consumed by each UAV over the mission (J).
pub fn total_energy(
    plan: &SlotMatrix,
    v_y: f64,
    params: &ScenarioParams,
) -> Result<Vec<f64>, ModelError> {
    if plan.rows() != params.uav_count || plan.cols() != params.slot_count {
        return Err(ModelError::PlanShape {
            rows: plan.rows(),
            cols: plan.cols(),
            uavs: params.uav_count,
            slots: params.slot_count,
        });
    }
    let t = params.mission_time();
    let prop = propulsion_power(v_y, &params.propulsion);
    Ok((0..plan.rows())
        .map(|i| {
            let offload: f64 = plan.row(i).iter().map(|p| params.slot_duration * p).sum();
            t * prop + t * params.radar_power[i] + offload
        })
        .collect())
}

//! Physical, radar, link and constraint constants of a sensing mission.
//!
//! Everything in [`ScenarioParams`] is stored in linear SI units with angles
//! in radians. Conversions from decibels and degrees happen once, when a
//! scenario file is resolved (see [`crate::scenario`]).

use serde::Serialize;

use crate::error::ParamError;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Converts a decibel value to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear ratio to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Rotary-wing propulsion constants of the steady-flight power model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropulsionParams {
    /// Blade profile power in hover, `P0` (W).
    pub profile_power: f64,
    /// Induced power in hover, `P_I` (W).
    pub induced_power: f64,
    /// Mean rotor induced velocity in hover, `v0` (m/s).
    pub induced_velocity: f64,
    /// Rotor blade tip speed (m/s).
    pub tip_speed: f64,
    /// Fuselage drag ratio `d0`.
    pub fuselage_drag: f64,
    /// Air density (kg/m^3).
    pub air_density: f64,
    /// Rotor solidity `s`.
    pub rotor_solidity: f64,
    /// Rotor disc area `A_e` (m^2).
    pub rotor_area: f64,
}

impl PropulsionParams {
    /// Widely used rotary-wing constants (P0 = 79.86 W, P_I = 88.63 W, v0 = 4.03 m/s).
    pub fn canonical() -> Self {
        Self {
            profile_power: 79.86,
            induced_power: 88.63,
            induced_velocity: 4.03,
            tip_speed: 120.0,
            fuselage_drag: 0.6,
            air_density: 1.225,
            rotor_solidity: 0.05,
            rotor_area: 0.503,
        }
    }

    /// Derives `P0`, `P_I` and `v0` from rotor physics.
    #[allow(clippy::too_many_arguments)]
    pub fn from_rotor(
        profile_drag: f64,
        air_density: f64,
        rotor_solidity: f64,
        rotor_area: f64,
        blade_angular_velocity: f64,
        rotor_radius: f64,
        induced_correction: f64,
        weight: f64,
        tip_speed: f64,
        fuselage_drag: f64,
    ) -> Self {
        let profile_power = profile_drag / 8.0
            * air_density
            * rotor_solidity
            * rotor_area
            * blade_angular_velocity.powi(3)
            * rotor_radius.powi(3);
        let induced_power =
            (1.0 + induced_correction) * weight.powf(1.5) / (2.0 * air_density * rotor_area).sqrt();
        let induced_velocity = (weight / (2.0 * air_density * rotor_area)).sqrt();
        Self {
            profile_power,
            induced_power,
            induced_velocity,
            tip_speed,
            fuselage_drag,
            air_density,
            rotor_solidity,
            rotor_area,
        }
    }

    /// Coefficient of the cubic parasitic term, `d0 * rho * s * A_e / 2`.
    pub fn parasitic_coefficient(&self) -> f64 {
        0.5 * self.fuselage_drag * self.air_density * self.rotor_solidity * self.rotor_area
    }
}

/// Box and QoS limits of the planning problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Limits {
    pub altitude_min: f64,
    pub altitude_max: f64,
    /// Look-angle bounds (rad).
    pub look_angle_min: f64,
    pub look_angle_max: f64,
    pub velocity_min: f64,
    pub velocity_max: f64,
    /// Minimum inter-UAV distance (m).
    pub safety_distance: f64,
    /// Minimum total coverage (m^2).
    pub coverage_min: f64,
    /// Minimum height of ambiguity on the phase-unwrapping pairs (m).
    pub hoa_min: f64,
}

/// All constants of one mission scenario, in linear SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioParams {
    pub uav_count: usize,
    pub slot_count: usize,
    /// Slot duration (s).
    pub slot_duration: f64,
    /// Range coordinate of the imaged line (m).
    pub target_x: f64,
    /// Ground station position (m).
    pub ground_station: [f64; 3],

    pub wavelength: f64,
    pub center_frequency: f64,
    /// Radar pulse bandwidth (Hz).
    pub pulse_bandwidth: f64,
    /// Elevation -3 dB beamwidth (rad).
    pub elevation_beamwidth: f64,
    /// Normalized backscatter coefficient (linear).
    pub backscatter: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    /// Pulse duration (s).
    pub pulse_duration: f64,
    /// Pulse repetition frequency (Hz).
    pub prf: f64,
    /// Receiver temperature (K).
    pub system_temperature: f64,
    pub noise_figure: f64,
    pub losses: f64,
    pub boltzmann: f64,
    /// Residual decorrelation applied to every pair.
    pub residual_coherence: f64,
    /// Number of looks.
    pub looks: f64,
    /// Bits per complex sample.
    pub bits_per_sample: f64,
    /// Radar transmit power per UAV (W).
    pub radar_power: Vec<f64>,

    /// FDMA bandwidth per UAV (Hz).
    pub comm_bandwidth: Vec<f64>,
    /// Reference channel gain over noise per UAV (linear, at 1 m).
    pub channel_gain: Vec<f64>,
    /// Maximum instantaneous communication power (W).
    pub comm_power_max: f64,
    /// Per-UAV energy budget (J).
    pub energy_max: f64,
    pub propulsion: PropulsionParams,

    pub limits: Limits,
    /// Pairs `(i, j)`, zero-based with `i < j`, on which the minimum HoA is enforced.
    pub phase_pairs: Vec<(usize, usize)>,
}

impl ScenarioParams {
    /// Default mission: five UAVs, 200 one-second slots.
    pub fn default_mission() -> Self {
        Self::default_with_uavs(5)
    }

    pub fn default_with_uavs(uav_count: usize) -> Self {
        Self {
            uav_count,
            slot_count: 200,
            slot_duration: 1.0,
            target_x: 20.0,
            ground_station: [70.0, 150.0, 25.0],
            wavelength: 0.12,
            center_frequency: 2.5e9,
            pulse_bandwidth: 3e9,
            elevation_beamwidth: 40f64.to_radians(),
            backscatter: db_to_linear(-10.0),
            tx_gain: db_to_linear(5.0),
            rx_gain: db_to_linear(5.0),
            pulse_duration: 1e-7,
            prf: 1e3,
            system_temperature: 400.0,
            noise_figure: db_to_linear(5.0),
            losses: db_to_linear(6.0),
            boltzmann: BOLTZMANN,
            residual_coherence: 0.6,
            looks: 4.0,
            bits_per_sample: 4.0,
            radar_power: vec![db_to_linear(15.0); uav_count],
            comm_bandwidth: vec![1e9; uav_count],
            channel_gain: vec![db_to_linear(20.0); uav_count],
            comm_power_max: db_to_linear(9.0),
            energy_max: 83.33 * 3600.0,
            propulsion: PropulsionParams::canonical(),
            limits: Limits {
                altitude_min: 1.0,
                altitude_max: 100.0,
                look_angle_min: 37.24f64.to_radians(),
                look_angle_max: 48.7f64.to_radians(),
                velocity_min: 1.0,
                velocity_max: 12.0,
                safety_distance: 2.0,
                coverage_min: 4.5e4,
                hoa_min: 1.2,
            },
            phase_pairs: all_pairs(uav_count),
        }
    }

    /// Fractional bandwidth `B_Rg / f0`.
    pub fn fractional_bandwidth(&self) -> f64 {
        self.pulse_bandwidth / self.center_frequency
    }

    /// `tau_p * PRF`.
    pub fn duty_cycle(&self) -> f64 {
        self.pulse_duration * self.prf
    }

    /// Mission duration `T = N * dt` (s).
    pub fn mission_time(&self) -> f64 {
        self.slot_count as f64 * self.slot_duration
    }

    pub fn pair_count(&self) -> usize {
        self.uav_count * (self.uav_count.saturating_sub(1)) / 2
    }

    /// Checks every invariant; the error names the first offending key.
    pub fn validate(&self) -> Result<(), ParamError> {
        let fail = |key: &'static str, reason: &str| {
            Err(ParamError::Invalid {
                key,
                reason: reason.to_string(),
            })
        };
        if self.uav_count < 2 {
            return fail("uav_count", "at least two UAVs are required");
        }
        if self.slot_count == 0 {
            return fail("slot_count", "must be at least 1");
        }
        let positive: [(&'static str, f64); 17] = [
            ("slot_duration", self.slot_duration),
            ("wavelength", self.wavelength),
            ("center_frequency", self.center_frequency),
            ("pulse_bandwidth", self.pulse_bandwidth),
            ("beamwidth_deg", self.elevation_beamwidth),
            ("backscatter_db", self.backscatter),
            ("tx_gain_dbi", self.tx_gain),
            ("rx_gain_dbi", self.rx_gain),
            ("pulse_duration", self.pulse_duration),
            ("prf", self.prf),
            ("system_temperature", self.system_temperature),
            ("noise_figure_db", self.noise_figure),
            ("losses_db", self.losses),
            ("looks", self.looks),
            ("bits_per_sample", self.bits_per_sample),
            ("power_max_dbw", self.comm_power_max),
            ("d_min", self.limits.safety_distance),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return fail(key, "must be finite and strictly positive");
            }
        }
        if !(self.energy_max.is_finite() && self.energy_max >= 0.0) {
            return fail("energy_max_wh", "must be finite and non-negative");
        }
        if !(self.residual_coherence > 0.0 && self.residual_coherence <= 1.0) {
            return fail("residual_coherence", "must lie in (0, 1]");
        }
        if self.looks < 1.0 {
            return fail("looks", "must be at least 1");
        }
        for (key, values) in [
            ("radar_power_dbw", &self.radar_power),
            ("bandwidth", &self.comm_bandwidth),
            ("channel_gain_db", &self.channel_gain),
        ] {
            if values.len() != self.uav_count {
                return fail(key, "needs one entry per UAV");
            }
            if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return fail(key, "must be finite and strictly positive");
            }
        }
        let p = &self.propulsion;
        for (key, value) in [
            ("hover_profile_power", p.profile_power),
            ("hover_induced_power", p.induced_power),
            ("induced_velocity", p.induced_velocity),
            ("tip_speed", p.tip_speed),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return fail(key, "must be finite and strictly positive");
            }
        }
        if p.parasitic_coefficient() < 0.0 {
            return fail("fuselage_drag", "parasitic coefficient must be non-negative");
        }
        let l = &self.limits;
        if !(l.altitude_min > 0.0) {
            return fail("z_min", "must be strictly positive");
        }
        if l.altitude_min > l.altitude_max {
            return fail("z_min", "must not exceed z_max");
        }
        if !(l.look_angle_min > 0.0 && l.look_angle_max < std::f64::consts::FRAC_PI_2) {
            return fail("theta_min_deg", "look angles must lie in (0, 90) degrees");
        }
        if l.look_angle_min >= l.look_angle_max {
            return fail("theta_min_deg", "must be below theta_max_deg");
        }
        if !(l.velocity_min > 0.0) {
            return fail("v_min", "must be strictly positive");
        }
        if l.velocity_min > l.velocity_max {
            return fail("v_min", "must not exceed v_max");
        }
        if l.coverage_min < 0.0 {
            return fail("C_min", "must be non-negative");
        }
        if l.hoa_min < 0.0 {
            return fail("h_amb_min", "must be non-negative");
        }
        if self.elevation_beamwidth / 2.0 + l.look_angle_max >= std::f64::consts::FRAC_PI_2 {
            return fail(
                "beamwidth_deg",
                "beam edge would reach the horizon at theta_max",
            );
        }
        for &(i, j) in &self.phase_pairs {
            if !(i < j && j < self.uav_count) {
                return fail("phase_pairs", "pairs must satisfy 1 <= i < j <= uav_count (one-based)");
            }
        }
        Ok(())
    }
}

/// Every pair `(i, j)` with `i < j < n`, in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

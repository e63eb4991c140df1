//! Scenario files.
//!
//! A scenario is a TOML document with the sections `[geometry]`, `[radar]`,
//! `[comms]`, `[energy]`, `[constraints]` and `[solver]`. Every key is
//! optional and defaults to the built-in mission; unknown keys are
//! rejected. Power-like quantities are written in dB and angles in degrees,
//! as they usually appear in link budgets; [`Scenario::params`] converts
//! them to the linear SI values used everywhere else.
//!
//! ```toml
//! [constraints]
//! h_amb_min = 2.0
//!
//! [solver]
//! inner_iterations = 200
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{CgaConfig, SaConfig};
use crate::coevolution::CoevolutionConfig;
use crate::error::{ConfigError, ParamError};
use crate::params::{all_pairs, db_to_linear, Limits, PropulsionParams, ScenarioParams, BOLTZMANN};
use crate::pso::SwarmSettings;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario value `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl ScenarioError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Io { .. } => 66,
            ScenarioError::Parse(_) => 64,
            ScenarioError::Invalid { .. } => 65,
        }
    }
}

impl From<ParamError> for ScenarioError {
    fn from(e: ParamError) -> Self {
        let ParamError::Invalid { key, reason } = e;
        ScenarioError::Invalid {
            key: key.to_string(),
            reason,
        }
    }
}

impl From<ConfigError> for ScenarioError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Invalid { key, reason } => ScenarioError::Invalid {
                key: key.to_string(),
                reason,
            },
            ConfigError::Params(p) => p.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    /// Number of UAVs, I.
    pub uav_count: usize,
    /// Number of time slots, N.
    pub slot_count: usize,
    /// Slot duration (s).
    pub slot_duration: f64,
    /// Range coordinate of the imaged line (m).
    pub target_x: f64,
    /// Ground-station position `[x, y, z]` (m).
    pub ground_station: [f64; 3],
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            uav_count: 5,
            slot_count: 200,
            slot_duration: 1.0,
            target_x: 20.0,
            ground_station: [70.0, 150.0, 25.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Radar {
    /// Wavelength (m).
    pub wavelength: f64,
    /// Carrier frequency (Hz).
    pub center_frequency: f64,
    /// Pulse bandwidth (Hz).
    pub pulse_bandwidth: f64,
    /// Elevation 3 dB beamwidth (degrees).
    pub beamwidth_deg: f64,
    /// Normalized backscatter coefficient (dB).
    pub backscatter_db: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    /// Radar transmit power of every UAV (dBW).
    pub radar_power_dbw: f64,
    /// Pulse duration (s).
    pub pulse_duration: f64,
    /// Pulse repetition frequency (Hz).
    pub prf: f64,
    /// Receiver temperature (K).
    pub system_temperature: f64,
    pub noise_figure_db: f64,
    pub losses_db: f64,
    /// Boltzmann constant (J/K).
    pub boltzmann: f64,
    /// Residual decorrelation factor of every pair.
    pub residual_coherence: f64,
    /// Number of looks.
    pub looks: f64,
}

impl Default for Radar {
    fn default() -> Self {
        Self {
            wavelength: 0.12,
            center_frequency: 2.5e9,
            pulse_bandwidth: 3e9,
            beamwidth_deg: 40.0,
            backscatter_db: -10.0,
            tx_gain_dbi: 5.0,
            rx_gain_dbi: 5.0,
            radar_power_dbw: 15.0,
            pulse_duration: 1e-7,
            prf: 1e3,
            system_temperature: 400.0,
            noise_figure_db: 5.0,
            losses_db: 6.0,
            boltzmann: BOLTZMANN,
            residual_coherence: 0.6,
            looks: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Comms {
    /// Bits per complex radar sample.
    pub bits_per_sample: f64,
    /// FDMA bandwidth of every UAV (Hz).
    pub bandwidth: f64,
    /// Reference channel gain over noise at 1 m (dB).
    pub channel_gain_db: f64,
    /// Maximum instantaneous transmit power (dBW).
    pub power_max_dbw: f64,
}

impl Default for Comms {
    fn default() -> Self {
        Self {
            bits_per_sample: 4.0,
            bandwidth: 1e9,
            channel_gain_db: 20.0,
            power_max_dbw: 9.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropulsionModel {
    /// Hover powers and induced velocity given directly.
    Canonical,
    /// Hover powers derived from rotor geometry.
    Rotor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Energy {
    /// Per-UAV energy budget (Wh).
    pub energy_max_wh: f64,
    pub propulsion_model: PropulsionModel,
    /// Blade profile power in hover (W); canonical model only.
    pub hover_profile_power: f64,
    /// Induced power in hover (W); canonical model only.
    pub hover_induced_power: f64,
    /// Mean rotor induced velocity in hover (m/s); canonical model only.
    pub induced_velocity: f64,
    pub tip_speed: f64,
    pub fuselage_drag: f64,
    /// Air density (kg/m^3).
    pub air_density: f64,
    pub rotor_solidity: f64,
    /// Rotor disc area (m^2).
    pub rotor_area: f64,
    /// Rotor model only: blade profile drag coefficient.
    pub profile_drag: f64,
    /// Rotor model only: blade angular velocity (rad/s).
    pub blade_angular_velocity: f64,
    /// Rotor model only: rotor radius (m).
    pub rotor_radius: f64,
    /// Rotor model only: aircraft weight (N).
    pub weight: f64,
    /// Rotor model only: induced power correction factor.
    pub induced_correction: f64,
}

impl Default for Energy {
    fn default() -> Self {
        let c = PropulsionParams::canonical();
        Self {
            energy_max_wh: 83.33,
            propulsion_model: PropulsionModel::Canonical,
            hover_profile_power: c.profile_power,
            hover_induced_power: c.induced_power,
            induced_velocity: c.induced_velocity,
            tip_speed: c.tip_speed,
            fuselage_drag: c.fuselage_drag,
            air_density: c.air_density,
            rotor_solidity: c.rotor_solidity,
            rotor_area: c.rotor_area,
            profile_drag: 0.012,
            blade_angular_velocity: 300.0,
            rotor_radius: 0.4,
            weight: 120.0,
            induced_correction: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constraints {
    /// Altitude bounds (m).
    pub z_min: f64,
    pub z_max: f64,
    /// Look-angle bounds (degrees).
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    /// Swarm velocity bounds (m/s).
    pub v_min: f64,
    pub v_max: f64,
    /// Minimum distance between UAVs (m).
    pub d_min: f64,
    /// Minimum covered area (m^2).
    #[serde(rename = "C_min")]
    pub c_min: f64,
    /// Minimum height of ambiguity (m).
    pub h_amb_min: f64,
    /// One-based UAV pairs on which `h_amb_min` is enforced; every pair when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_pairs: Option<Vec<[usize; 2]>>,
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            z_min: 1.0,
            z_max: 100.0,
            theta_min_deg: 37.24,
            theta_max_deg: 48.7,
            v_min: 1.0,
            v_max: 12.0,
            d_min: 2.0,
            c_min: 4.5e4,
            h_amb_min: 1.2,
            phase_pairs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solver {
    /// Inner formation swarm size, D1.
    pub inner_population: usize,
    /// Inner iterations, K1.
    pub inner_iterations: usize,
    /// Outer velocity swarm size, D2.
    pub outer_population: usize,
    /// Outer generations, K2.
    pub outer_generations: usize,
    pub c1: f64,
    pub c2: f64,
    pub w_start: f64,
    pub w_end: f64,
    /// Initial particle speeds are drawn from `U(0, v_pso_max)`.
    pub v_pso_max: f64,
    /// Optional per-component bound on particle velocities.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity_clamp: Option<f64>,
    pub warm_start: bool,
    /// Worst-feasible reference used until a feasible candidate appears (m).
    pub sigma_cap: f64,
    pub record_all_islands: bool,
    pub cga_population: usize,
    pub cga_generations: usize,
    pub cga_selection_rate: f64,
    pub cga_mutation_rate: f64,
    pub cga_mutation_scale: f64,
    pub cga_blend_alpha: f64,
    pub sa_iterations: usize,
    pub sa_initial_temperature: f64,
    pub sa_step_scale: f64,
}

impl Default for Solver {
    fn default() -> Self {
        let cga = CgaConfig::default();
        let sa = SaConfig::default();
        let s = SwarmSettings::new(100, 100);
        Self {
            inner_population: 100,
            inner_iterations: 100,
            outer_population: 16,
            outer_generations: 20,
            c1: s.c1,
            c2: s.c2,
            w_start: s.inertia_start,
            w_end: s.inertia_end,
            v_pso_max: s.max_initial_speed,
            velocity_clamp: None,
            warm_start: false,
            sigma_cap: 10.0,
            record_all_islands: false,
            cga_population: cga.population,
            cga_generations: cga.generations,
            cga_selection_rate: cga.selection_rate,
            cga_mutation_rate: cga.mutation_rate,
            cga_mutation_scale: cga.mutation_scale,
            cga_blend_alpha: cga.blend_alpha,
            sa_iterations: sa.iterations,
            sa_initial_temperature: sa.initial_temperature,
            sa_step_scale: sa.step_scale,
        }
    }
}

/// A complete scenario as written in a file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub geometry: Geometry,
    pub radar: Radar,
    pub comms: Comms,
    pub energy: Energy,
    pub constraints: Constraints,
    pub solver: Solver,
}

/// Short names accepted wherever a key is expected.
const ALIASES: [(&str, &str); 7] = [
    ("I", "geometry.uav_count"),
    ("N", "geometry.slot_count"),
    ("E_max", "energy.energy_max_wh"),
    ("P_max", "comms.power_max_dbw"),
    ("n_B", "comms.bits_per_sample"),
    ("C_min", "constraints.C_min"),
    ("h_amb_min", "constraints.h_amb_min"),
];

impl Scenario {
    /// Parses a scenario document.
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        Self::with_overrides(text, &[])
    }

    /// Parses a document and applies `key=value` overrides before
    /// deserializing, so overrides see the same checks as file values.
    pub fn with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self, ScenarioError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ScenarioError::Parse(e.to_string()))?;
        for (key, value) in overrides {
            set_key(&mut table, key, value)?;
        }
        let scenario: Scenario = table
            .try_into()
            .map_err(|e: toml::de::Error| ScenarioError::Parse(e.to_string()))?;
        scenario.check()?;
        Ok(scenario)
    }

    /// Reads a scenario file, applying `overrides`.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::with_overrides(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    /// Returns a copy with `key` set to `value` (e.g. `"h_amb_min"`, `"2.0"`).
    pub fn with_key(&self, key: &str, value: &str) -> Result<Self, ScenarioError> {
        let mut table = toml::Table::try_from(self).expect("scenario serializes to a table");
        set_key(&mut table, key, value)?;
        let scenario: Scenario = table
            .try_into()
            .map_err(|e: toml::de::Error| ScenarioError::Parse(e.to_string()))?;
        scenario.check()?;
        Ok(scenario)
    }

    /// Resolves every key into linear SI mission constants and validates them.
    pub fn params(&self) -> Result<ScenarioParams, ScenarioError> {
        let g = &self.geometry;
        let r = &self.radar;
        let c = &self.comms;
        let e = &self.energy;
        let k = &self.constraints;
        let n = g.uav_count;
        let propulsion = match e.propulsion_model {
            PropulsionModel::Canonical => PropulsionParams {
                profile_power: e.hover_profile_power,
                induced_power: e.hover_induced_power,
                induced_velocity: e.induced_velocity,
                tip_speed: e.tip_speed,
                fuselage_drag: e.fuselage_drag,
                air_density: e.air_density,
                rotor_solidity: e.rotor_solidity,
                rotor_area: e.rotor_area,
            },
            PropulsionModel::Rotor => PropulsionParams::from_rotor(
                e.profile_drag,
                e.air_density,
                e.rotor_solidity,
                e.rotor_area,
                e.blade_angular_velocity,
                e.rotor_radius,
                e.induced_correction,
                e.weight,
                e.tip_speed,
                e.fuselage_drag,
            ),
        };
        let phase_pairs = match &k.phase_pairs {
            None => all_pairs(n),
            Some(pairs) => pairs
                .iter()
                .map(|&[i, j]| {
                    if i == 0 || j == 0 {
                        Err(ScenarioError::Invalid {
                            key: "phase_pairs".into(),
                            reason: "UAV indices are one-based".into(),
                        })
                    } else {
                        Ok((i - 1, j - 1))
                    }
                })
                .collect::<Result<_, _>>()?,
        };
        let params = ScenarioParams {
            uav_count: n,
            slot_count: g.slot_count,
            slot_duration: g.slot_duration,
            target_x: g.target_x,
            ground_station: g.ground_station,
            wavelength: r.wavelength,
            center_frequency: r.center_frequency,
            pulse_bandwidth: r.pulse_bandwidth,
            elevation_beamwidth: r.beamwidth_deg.to_radians(),
            backscatter: db_to_linear(r.backscatter_db),
            tx_gain: db_to_linear(r.tx_gain_dbi),
            rx_gain: db_to_linear(r.rx_gain_dbi),
            pulse_duration: r.pulse_duration,
            prf: r.prf,
            system_temperature: r.system_temperature,
            noise_figure: db_to_linear(r.noise_figure_db),
            losses: db_to_linear(r.losses_db),
            boltzmann: r.boltzmann,
            residual_coherence: r.residual_coherence,
            looks: r.looks,
            bits_per_sample: c.bits_per_sample,
            radar_power: vec![db_to_linear(r.radar_power_dbw); n],
            comm_bandwidth: vec![c.bandwidth; n],
            channel_gain: vec![db_to_linear(c.channel_gain_db); n],
            comm_power_max: db_to_linear(c.power_max_dbw),
            energy_max: e.energy_max_wh * 3600.0,
            propulsion,
            limits: Limits {
                altitude_min: k.z_min,
                altitude_max: k.z_max,
                look_angle_min: k.theta_min_deg.to_radians(),
                look_angle_max: k.theta_max_deg.to_radians(),
                velocity_min: k.v_min,
                velocity_max: k.v_max,
                safety_distance: k.d_min,
                coverage_min: k.c_min,
                hoa_min: k.h_amb_min,
            },
            phase_pairs,
        };
        params.validate()?;
        Ok(params)
    }

    /// Validates both the mission constants and the solver settings.
    pub fn check(&self) -> Result<(), ScenarioError> {
        let params = self.params()?;
        self.coevolution_config(0, 1).validate(&params)?;
        self.cga_config(0, false).validate()?;
        self.sa_config(0).validate()?;
        Ok(())
    }

    fn swarm(&self, population: usize, iterations: usize) -> SwarmSettings {
        let s = &self.solver;
        SwarmSettings {
            population,
            iterations,
            c1: s.c1,
            c2: s.c2,
            inertia_start: s.w_start,
            inertia_end: s.w_end,
            max_initial_speed: s.v_pso_max,
            velocity_clamp: s.velocity_clamp,
        }
    }

    pub fn coevolution_config(&self, seed: u64, workers: usize) -> CoevolutionConfig {
        let s = &self.solver;
        CoevolutionConfig {
            outer: self.swarm(s.outer_population, s.outer_generations),
            inner: self.swarm(s.inner_population, s.inner_iterations),
            worker_count: workers,
            seed,
            sigma_cap: s.sigma_cap,
            warm_start: s.warm_start,
            record_all_islands: s.record_all_islands,
            wall_clock: false,
        }
    }

    pub fn cga_config(&self, seed: u64, parallel: bool) -> CgaConfig {
        let s = &self.solver;
        CgaConfig {
            population: s.cga_population,
            generations: s.cga_generations,
            selection_rate: s.cga_selection_rate,
            mutation_rate: s.cga_mutation_rate,
            mutation_scale: s.cga_mutation_scale,
            blend_alpha: s.cga_blend_alpha,
            crossover: true,
            seed,
            sigma_cap: s.sigma_cap,
            parallel,
            wall_clock: false,
        }
    }

    pub fn sa_config(&self, seed: u64) -> SaConfig {
        let s = &self.solver;
        SaConfig {
            iterations: s.sa_iterations,
            initial_temperature: s.sa_initial_temperature,
            step_scale: s.sa_step_scale,
            seed,
            sigma_cap: s.sigma_cap,
            wall_clock: false,
        }
    }
}

/// Resolves `key` (`section.key`, a bare key or an alias) to its section.
pub fn resolve_key(key: &str) -> Result<(String, String), ScenarioError> {
    let key = ALIASES.iter().find(|(a, _)| *a == key).map_or(key, |(_, full)| full);
    let defaults = toml::Table::try_from(Scenario::default()).expect("defaults serialize");
    let unknown = || ScenarioError::Invalid {
        key: key.to_string(),
        reason: "no such scenario key".into(),
    };
    let known = |section: &str, name: &str| {
        defaults
            .get(section)
            .and_then(|s| s.as_table())
            .is_some_and(|s| s.contains_key(name) || OPTIONAL_KEYS.contains(&(section, name)))
    };
    if let Some((section, name)) = key.split_once('.') {
        return if known(section, name) {
            Ok((section.to_string(), name.to_string()))
        } else {
            Err(unknown())
        };
    }
    let sections: Vec<&String> = defaults.keys().filter(|s| known(s, key)).collect();
    match sections.as_slice() {
        [one] => Ok(((*one).clone(), key.to_string())),
        [] => Err(unknown()),
        _ => Err(ScenarioError::Invalid {
            key: key.to_string(),
            reason: "ambiguous key; prefix it with its section".into(),
        }),
    }
}

/// Keys that are absent from the serialized defaults.
const OPTIONAL_KEYS: [(&str, &str); 2] = [("constraints", "phase_pairs"), ("solver", "velocity_clamp")];

fn set_key(table: &mut toml::Table, key: &str, value: &str) -> Result<(), ScenarioError> {
    let (section, name) = resolve_key(key)?;
    let parsed: toml::Value = match format!("v = {value}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(value.to_string()),
    };
    let entry = table
        .entry(section.clone())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry.as_table_mut() {
        Some(t) => {
            t.insert(name, parsed);
            Ok(())
        }
        None => Err(ScenarioError::Parse(format!("`{section}` must be a table"))),
    }
}

/// Splits a `KEY=VALUE` override.
pub fn parse_override(text: &str) -> Result<(String, String), String> {
    text.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| format!("expected KEY=VALUE, got `{text}`"))
}

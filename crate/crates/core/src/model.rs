//! Closed-form InSAR sensing model: acquisition geometry, coverage, SNR,
//! coherence, height of ambiguity and the fused DEM height error.
//!
//! All functions are pure. Angles are radians, distances metres.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::params::{ScenarioParams, SPEED_OF_LIGHT};

/// Look angles closer than this to 0 or pi/2 are outside the model's domain.
pub const ANGLE_MARGIN: f64 = 1e-6;

/// Across-track position of one UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.z - other.z)
    }
}

/// Across-track positions of the swarm; index 0 is the master UAV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Formation {
    positions: Vec<Position>,
}

impl Formation {
    pub fn new(positions: Vec<Position>) -> Self {
        Self { positions }
    }

    /// Builds a formation from the particle layout `(x1, z1, x2, z2, ...)`.
    ///
    /// Panics if `coords` has odd length.
    pub fn from_interleaved(coords: &[f64]) -> Self {
        assert!(coords.len() % 2 == 0, "interleaved coordinates need even length");
        Self {
            positions: coords
                .chunks_exact(2)
                .map(|c| Position::new(c[0], c[1]))
                .collect(),
        }
    }

    pub fn to_interleaved(&self) -> Vec<f64> {
        self.positions.iter().flat_map(|p| [p.x, p.z]).collect()
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn mean_altitude(&self) -> f64 {
        self.positions.iter().map(|p| p.z).sum::<f64>() / self.len() as f64
    }
}

/// Look angle towards the target line and slant range, `(theta, r)`.
pub fn look_angle_and_range(pos: Position, target_x: f64) -> Result<(f64, f64), ModelError> {
    if !(pos.z > 0.0) {
        return Err(ModelError::NonPositiveAltitude {
            index: 0,
            altitude: pos.z,
        });
    }
    let theta = ((target_x - pos.x) / pos.z).atan();
    let range = (pos.x - target_x).hypot(pos.z);
    Ok((theta, range))
}

/// Interferometric baseline of a UAV pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Baseline {
    /// Baseline length (m).
    pub length: f64,
    /// Tilt of the baseline against the horizontal (rad).
    pub tilt: f64,
    /// Baseline component orthogonal to the first UAV's line of sight (m).
    pub perpendicular: f64,
}

/// Baseline of the pair `(qi, qj)` given the first UAV's look angle.
pub fn baseline_from_look_angle(qi: Position, qj: Position, theta_i: f64) -> Baseline {
    let length = qi.distance(&qj);
    if length == 0.0 {
        return Baseline {
            length,
            tilt: 0.0,
            perpendicular: 0.0,
        };
    }
    // dz / 0 is +-inf, so a vertical baseline gets tilt +-pi/2.
    let tilt = ((qj.z - qi.z) / (qj.x - qi.x)).atan();
    Baseline {
        length,
        tilt,
        perpendicular: length * (theta_i - tilt).cos(),
    }
}

pub fn baseline_geometry(qi: Position, qj: Position, target_x: f64) -> Result<Baseline, ModelError> {
    let (theta_i, _) = look_angle_and_range(qi, target_x)?;
    Ok(baseline_from_look_angle(qi, qj, theta_i))
}

/// Ground swath width of one UAV.
pub fn swath_width(theta: f64, range: f64, beamwidth: f64) -> f64 {
    beamwidth * range / theta.cos()
}

/// Look angles and slant ranges of every UAV, with domain checks.
fn acquisition_geometry(
    formation: &Formation,
    params: &ScenarioParams,
) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
    if formation.len() != params.uav_count {
        return Err(ModelError::FormationSize {
            expected: params.uav_count,
            found: formation.len(),
        });
    }
    let mut thetas = Vec::with_capacity(formation.len());
    let mut ranges = Vec::with_capacity(formation.len());
    for (index, pos) in formation.positions().iter().enumerate() {
        let (theta, range) = look_angle_and_range(*pos, params.target_x).map_err(|_| {
            ModelError::NonPositiveAltitude {
                index,
                altitude: pos.z,
            }
        })?;
        if !(ANGLE_MARGIN..=FRAC_PI_2 - ANGLE_MARGIN).contains(&theta) {
            return Err(ModelError::LookAngle {
                index,
                angle: theta,
            });
        }
        thetas.push(theta);
        ranges.push(range);
    }
    Ok((thetas, ranges))
}

fn check_velocity(v_y: f64) -> Result<(), ModelError> {
    if v_y > 0.0 && v_y.is_finite() {
        Ok(())
    } else {
        Err(ModelError::Velocity(v_y))
    }
}

/// Per-UAV swath widths and the total coverage `N * min(S) * v_y * dt`.
pub fn swath_and_coverage(
    formation: &Formation,
    v_y: f64,
    params: &ScenarioParams,
) -> Result<(Vec<f64>, f64), ModelError> {
    check_velocity(v_y)?;
    let (thetas, ranges) = acquisition_geometry(formation, params)?;
    let swaths: Vec<f64> = thetas
        .iter()
        .zip(&ranges)
        .map(|(t, r)| swath_width(*t, *r, params.elevation_beamwidth))
        .collect();
    let coverage = total_coverage(&swaths, v_y, params);
    Ok((swaths, coverage))
}

fn total_coverage(swaths: &[f64], v_y: f64, params: &ScenarioParams) -> f64 {
    let narrowest = swaths.iter().copied().fold(f64::INFINITY, f64::min);
    params.slot_count as f64 * narrowest * v_y * params.slot_duration
}

/// Link-budget factor shared by every UAV's SNR, excluding power and geometry.
fn snr_factor(v_y: f64, params: &ScenarioParams) -> f64 {
    let num = params.backscatter
        * params.tx_gain
        * params.rx_gain
        * params.wavelength.powi(3)
        * SPEED_OF_LIGHT
        * params.duty_cycle();
    let den = 4f64.powi(4)
        * PI.powi(3)
        * v_y
        * params.boltzmann
        * params.system_temperature
        * params.pulse_bandwidth
        * params.noise_figure
        * params.losses;
    num / den
}

fn snr_from_geometry(thetas: &[f64], ranges: &[f64], v_y: f64, params: &ScenarioParams) -> Vec<f64> {
    let k = snr_factor(v_y, params);
    let r1 = ranges[0];
    thetas
        .iter()
        .zip(ranges)
        .zip(&params.radar_power)
        .enumerate()
        .map(|(i, ((theta, r), power))| {
            // master is mono-static; slaves use the bi-static approximation
            let path = if i == 0 { r1 * r1 * r1 } else { r1 * r1 * r };
            k * power / (theta.sin() * path)
        })
        .collect()
}

/// Mono-static SNR of the master and bi-static SNRs of the slaves (linear).
pub fn snr(formation: &Formation, v_y: f64, params: &ScenarioParams) -> Result<Vec<f64>, ModelError> {
    check_velocity(v_y)?;
    let (thetas, ranges) = acquisition_geometry(formation, params)?;
    Ok(snr_from_geometry(&thetas, &ranges, v_y, params))
}

/// SNR decorrelation of a pair.
pub fn snr_decorrelation(snr_i: f64, snr_j: f64) -> f64 {
    1.0 / ((1.0 + 1.0 / snr_i) * (1.0 + 1.0 / snr_j)).sqrt()
}

/// Baseline (range spectral) decorrelation for fractional bandwidth `frac_bw`.
///
/// Clamped to `[0, 1]`; it reaches exactly 1 for equal look angles.
pub fn baseline_decorrelation(theta_i: f64, theta_j: f64, frac_bw: f64) -> f64 {
    let chi = theta_i.max(theta_j).sin() / (0.5 * (theta_i.sin() + theta_j.sin()));
    let g = ((2.0 + frac_bw) / (1.0 + chi) - (2.0 - frac_bw) / (1.0 + 1.0 / chi)) / frac_bw;
    g.clamp(0.0, 1.0)
}

/// Coherence factors of one interferometric pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coherence {
    pub snr: f64,
    pub range: f64,
    pub total: f64,
}

pub fn coherence(
    theta_i: f64,
    theta_j: f64,
    snr_i: f64,
    snr_j: f64,
    frac_bw: f64,
    residual: f64,
) -> Coherence {
    let snr = snr_decorrelation(snr_i, snr_j);
    let range = baseline_decorrelation(theta_i, theta_j, frac_bw);
    Coherence {
        snr,
        range,
        total: range * snr * residual,
    }
}

/// Height of ambiguity; `+inf` for a zero perpendicular baseline.
pub fn height_of_ambiguity(theta: f64, range: f64, b_perp: f64, wavelength: f64) -> f64 {
    let b = b_perp.abs();
    if b == 0.0 {
        f64::INFINITY
    } else {
        wavelength * range * theta.sin() / b
    }
}

/// Cramér-Rao phase error and the resulting pair height error, `(sigma_phi, sigma_h)`.
pub fn pair_height_error(gamma: f64, looks: f64, hoa: f64) -> Result<(f64, f64), ModelError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(ModelError::Coherence(gamma));
    }
    let sigma_phi = ((1.0 - gamma * gamma) / (2.0 * looks)).sqrt() / gamma;
    let sigma_h = if sigma_phi == 0.0 {
        0.0
    } else {
        hoa * sigma_phi / (2.0 * PI)
    };
    Ok((sigma_phi, sigma_h))
}

/// Inverse-variance fusion of pair height errors.
///
/// Infinite entries carry zero weight. Returns `+inf` when no entry is
/// finite and `0` when some pair is error-free.
pub fn fused_height_error(errors: &[f64]) -> Result<f64, ModelError> {
    if errors.is_empty() {
        return Err(ModelError::EmptyFusion);
    }
    let mut weight_sum = 0.0;
    for &s in errors {
        if s == 0.0 {
            return Ok(0.0);
        }
        if s.is_finite() {
            weight_sum += 1.0 / (s * s);
        }
    }
    if weight_sum == 0.0 {
        Ok(f64::INFINITY)
    } else {
        // sum(w^2 s^2) / (sum w)^2 with w = 1/s^2 collapses to 1 / sum w
        Ok(weight_sum.powf(-0.5))
    }
}

/// Geometry and error terms of one UAV pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMetrics {
    pub i: usize,
    pub j: usize,
    pub baseline: f64,
    pub tilt: f64,
    pub b_perp: f64,
    pub gamma_snr: f64,
    pub gamma_rg: f64,
    pub gamma: f64,
    pub hoa: f64,
    pub sigma_phi: f64,
    pub sigma_h: f64,
}

/// Full sensing evaluation of a formation flying at `v_y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sensing {
    pub look_angles: Vec<f64>,
    pub ranges: Vec<f64>,
    pub swaths: Vec<f64>,
    pub coverage: f64,
    pub snr: Vec<f64>,
    pub pairs: Vec<PairMetrics>,
    pub sigma_h: f64,
}

pub fn evaluate_sensing(
    formation: &Formation,
    v_y: f64,
    params: &ScenarioParams,
) -> Result<Sensing, ModelError> {
    check_velocity(v_y)?;
    let (thetas, ranges) = acquisition_geometry(formation, params)?;
    let swaths: Vec<f64> = thetas
        .iter()
        .zip(&ranges)
        .map(|(t, r)| swath_width(*t, *r, params.elevation_beamwidth))
        .collect();
    let coverage = total_coverage(&swaths, v_y, params);
    let snr = snr_from_geometry(&thetas, &ranges, v_y, params);
    let frac_bw = params.fractional_bandwidth();
    let q = formation.positions();

    let mut pairs = Vec::with_capacity(params.pair_count());
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let base = baseline_from_look_angle(q[i], q[j], thetas[i]);
            let coh = coherence(
                thetas[i],
                thetas[j],
                snr[i],
                snr[j],
                frac_bw,
                params.residual_coherence,
            );
            let hoa = height_of_ambiguity(thetas[i], ranges[i], base.perpendicular, params.wavelength);
            let (sigma_phi, sigma_h) = if coh.total > 0.0 {
                pair_height_error(coh.total.min(1.0), params.looks, hoa)?
            } else {
                (f64::INFINITY, f64::INFINITY)
            };
            pairs.push(PairMetrics {
                i,
                j,
                baseline: base.length,
                tilt: base.tilt,
                b_perp: base.perpendicular,
                gamma_snr: coh.snr,
                gamma_rg: coh.range,
                gamma: coh.total,
                hoa,
                sigma_phi,
                sigma_h,
            });
        }
    }
    let errors: Vec<f64> = pairs.iter().map(|p| p.sigma_h).collect();
    let sigma_h = fused_height_error(&errors)?;
    Ok(Sensing {
        look_angles: thetas,
        ranges,
        swaths,
        coverage,
        snr,
        pairs,
        sigma_h,
    })
}

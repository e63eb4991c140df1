//! The planning problem as seen by the solvers: search boxes, constraint
//! violation metrics and the non-parameterized penalty fitness.
//!
//! A candidate's [`Evaluation`] keeps the raw height error and the summed
//! violations apart, so its fitness can be recomputed whenever the
//! worst-feasible reference moves.

use serde::{Deserialize, Serialize};

use crate::comms::{self, LinkState, PowerViolations, SlotMatrix};
use crate::error::ModelError;
use crate::model::{self, Formation, PairMetrics, Sensing};
use crate::params::ScenarioParams;

pub use crate::comms::power_violations;

/// Relative tolerance when checking achieved rates against required rates.
pub const RATE_TOLERANCE: f64 = 1e-9;

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len(), "bound vectors differ in length");
        Self { lower, upper }
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| (*lo..=*hi).contains(v))
    }

    /// Concatenates two boxes.
    pub fn join(&self, other: &SearchBox) -> SearchBox {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        lower.extend_from_slice(&other.lower);
        upper.extend_from_slice(&other.upper);
        SearchBox { lower, upper }
    }
}

/// Range bounds implied by the altitude and look-angle limits, `(x_min, x_max)`.
pub fn range_bounds(params: &ScenarioParams) -> (f64, f64) {
    let l = &params.limits;
    (
        params.target_x - l.altitude_max * l.look_angle_max.tan(),
        params.target_x - l.altitude_min * l.look_angle_min.tan(),
    )
}

/// Box over the interleaved formation layout `(x1, z1, ..., xI, zI)`.
pub fn formation_bounds(params: &ScenarioParams) -> SearchBox {
    let (x_min, x_max) = range_bounds(params);
    let l = &params.limits;
    let lower = (0..params.uav_count).flat_map(|_| [x_min, l.altitude_min]).collect();
    let upper = (0..params.uav_count).flat_map(|_| [x_max, l.altitude_max]).collect();
    SearchBox::new(lower, upper)
}

/// One-dimensional box for the swarm velocity.
pub fn velocity_bounds(params: &ScenarioParams) -> SearchBox {
    SearchBox::new(vec![params.limits.velocity_min], vec![params.limits.velocity_max])
}

/// Violation magnitudes of the formation-level constraints.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FormationViolations {
    /// Look-angle window.
    pub g2: f64,
    /// Safety distance.
    pub g5: f64,
    /// Coverage.
    pub g6: f64,
    /// Minimum height of ambiguity.
    pub g7: f64,
    /// Offloading rate.
    pub g8: f64,
}

impl FormationViolations {
    pub fn total(&self) -> f64 {
        self.g2 + self.g5 + self.g6 + self.g7 + self.g8
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0.0
    }
}

fn hinge(x: f64) -> f64 {
    x.max(0.0)
}

fn geometric_violations(sensing: &Sensing, params: &ScenarioParams) -> FormationViolations {
    let l = &params.limits;
    let g2 = sensing
        .look_angles
        .iter()
        .map(|t| hinge(l.look_angle_min - t) + hinge(t - l.look_angle_max))
        .sum();
    let g5 = sensing
        .pairs
        .iter()
        .map(|p| hinge(l.safety_distance - p.baseline))
        .sum();
    let g6 = hinge(l.coverage_min - sensing.coverage);
    let g7 = params
        .phase_pairs
        .iter()
        .map(|&(i, j)| hinge(l.hoa_min - sensing.pairs[pair_index(i, j, params.uav_count)].hoa))
        .sum();
    FormationViolations {
        g2,
        g5,
        g6,
        g7,
        g8: 0.0,
    }
}

/// Position of pair `(i, j)` in the lexicographic pair list.
pub fn pair_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Rate shortfall `sum [R_min,i - R_i,n]+` of a given power schedule.
///
/// Shortfalls within [`RATE_TOLERANCE`] of the required rate count as met.
pub fn rate_shortfall(link: &LinkState, powers: &SlotMatrix, params: &ScenarioParams) -> f64 {
    let mut total = 0.0;
    for i in 0..link.distances.rows() {
        let r_min = link.required_rates[i];
        for n in 0..link.distances.cols() {
            let rate = comms::throughput(
                powers.get(i, n),
                link.distances.get(i, n),
                params.comm_bandwidth[i],
                params.channel_gain[i],
            );
            let gap = r_min - rate;
            if gap > RATE_TOLERANCE * r_min {
                total += gap;
            }
        }
    }
    total
}

/// Formation-level violations and the sensing evaluation they came from.
///
/// With `powers = None` the minimum-power schedule is implied, under which
/// every rate requirement is met exactly and `g8 = 0`.
pub fn formation_violations(
    formation: &Formation,
    v_y: f64,
    powers: Option<&SlotMatrix>,
    params: &ScenarioParams,
) -> Result<(FormationViolations, Sensing), ModelError> {
    let sensing = model::evaluate_sensing(formation, v_y, params)?;
    let mut g = geometric_violations(&sensing, params);
    if let Some(powers) = powers {
        let link = comms::link_state(formation, v_y, params)?;
        g.g8 = rate_shortfall(&link, powers, params);
    }
    Ok((g, sensing))
}

/// Outcome of evaluating one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    /// Fused height error (m); `+inf` when the candidate could not be evaluated.
    pub objective: f64,
    /// Sum of the violation metrics that decide the penalty.
    pub violation: f64,
    pub feasible: bool,
}

impl Evaluation {
    /// A feasible evaluation with the given objective value.
    pub fn feasible(objective: f64) -> Self {
        Self {
            objective,
            violation: 0.0,
            feasible: true,
        }
    }

    pub fn infeasible(objective: f64, violation: f64) -> Self {
        Self {
            objective,
            violation,
            feasible: false,
        }
    }

    /// Candidate outside the model's domain: maximal violation.
    pub fn unevaluable() -> Self {
        Self::infeasible(f64::INFINITY, f64::INFINITY)
    }

    /// Penalty fitness against the current worst feasible height error.
    pub fn fitness(&self, worst_feasible: f64) -> f64 {
        if self.feasible {
            self.objective
        } else {
            worst_feasible + self.violation
        }
    }
}

/// Running maximum of feasible objective values, with a bootstrap cap used
/// until the first feasible candidate is seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstFeasible {
    cap: f64,
    observed: Option<f64>,
}

impl WorstFeasible {
    pub fn new(cap: f64) -> Self {
        Self { cap, observed: None }
    }

    pub fn value(&self) -> f64 {
        self.observed.unwrap_or(self.cap)
    }

    pub fn observed(&self) -> Option<f64> {
        self.observed
    }

    pub fn observe(&mut self, eval: &Evaluation) {
        if eval.feasible && eval.objective.is_finite() {
            self.observed = Some(self.observed.map_or(eval.objective, |w| w.max(eval.objective)));
        }
    }

    pub fn merge(&mut self, other: &WorstFeasible) {
        if let Some(o) = other.observed {
            self.observed = Some(self.observed.map_or(o, |w| w.max(o)));
        }
    }
}

/// Evaluates an interleaved formation candidate for a fixed swarm velocity.
pub fn evaluate_formation(candidate: &[f64], v_y: f64, params: &ScenarioParams) -> Evaluation {
    let formation = Formation::from_interleaved(candidate);
    match formation_violations(&formation, v_y, None, params) {
        Ok((g, sensing)) => {
            if g.is_zero() {
                Evaluation::feasible(sensing.sigma_h)
            } else {
                Evaluation::infeasible(sensing.sigma_h, g.total())
            }
        }
        Err(err) => {
            log::debug!("unevaluable formation candidate: {err}");
            Evaluation::unevaluable()
        }
    }
}

/// Inner fitness: `sigma_h` when feasible, else `sigma_max + g2 + g5 + g6 + g7 + g8`.
pub fn fitness_formation(candidate: &[f64], v_y: f64, sigma_max: f64, params: &ScenarioParams) -> f64 {
    evaluate_formation(candidate, v_y, params).fitness(sigma_max)
}

/// Layers the power-allocation verdict over a formation evaluation.
///
/// When the minimum powers are feasible the formation's evaluation stands.
/// Otherwise `g10 + g11` is added to whatever the formation already
/// violates, so a candidate cannot hide geometric violations behind a
/// nearly feasible power schedule. For a feasible formation this is exactly
/// `sigma_max + g10 + g11`.
pub fn compose_power(inner: Evaluation, power_feasible: bool, power: PowerViolations) -> Evaluation {
    if power_feasible {
        inner
    } else {
        Evaluation::infeasible(inner.objective, inner.violation + power.total())
    }
}

/// Power verdict for one formation at one speed.
pub fn power_check(
    formation: &Formation,
    v_y: f64,
    params: &ScenarioParams,
) -> Result<(bool, PowerViolations, LinkState), ModelError> {
    let link = comms::link_state(formation, v_y, params)?;
    let (cap_ok, budget_ok) = comms::minimum_powers_feasible(&link, v_y, params);
    let g = comms::power_violations(&link, v_y, params);
    Ok((cap_ok && budget_ok, g, link))
}

/// Evaluates the flattened joint vector `(x1, z1, ..., xI, zI, v_y)` with
/// minimum-power filling.
pub fn evaluate_joint(x: &[f64], params: &ScenarioParams) -> Evaluation {
    let (coords, v_y) = x.split_at(x.len() - 1);
    let v_y = v_y[0];
    let inner = evaluate_formation(coords, v_y, params);
    if inner.violation.is_infinite() {
        return inner;
    }
    let formation = Formation::from_interleaved(coords);
    match power_check(&formation, v_y, params) {
        Ok((ok, g, _)) => compose_power(inner, ok, g),
        Err(err) => {
            log::debug!("unevaluable joint candidate: {err}");
            Evaluation::unevaluable()
        }
    }
}

/// Box over the joint vector `(formation, v_y)`.
pub fn joint_bounds(params: &ScenarioParams) -> SearchBox {
    formation_bounds(params).join(&velocity_bounds(params))
}

/// A complete decision: formation, swarm velocity and power schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwarmPlan {
    pub formation: Formation,
    pub v_y: f64,
    pub powers: SlotMatrix,
}

impl SwarmPlan {
    /// Plan with the minimum-power schedule for `formation` at `v_y`.
    pub fn with_minimum_powers(
        formation: Formation,
        v_y: f64,
        params: &ScenarioParams,
    ) -> Result<Self, ModelError> {
        let link = comms::link_state(&formation, v_y, params)?;
        Ok(Self {
            formation,
            v_y,
            powers: link.min_powers,
        })
    }
}

/// Per-constraint verdicts, checked from raw values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintFlags {
    pub altitude: bool,
    pub look_angle: bool,
    pub velocity: bool,
    pub power_cap: bool,
    pub safety_distance: bool,
    pub coverage: bool,
    pub hoa: bool,
    pub rate: bool,
    pub energy: bool,
}

impl ConstraintFlags {
    pub fn all(&self) -> bool {
        self.altitude
            && self.look_angle
            && self.velocity
            && self.power_cap
            && self.safety_distance
            && self.coverage
            && self.hoa
            && self.rate
            && self.energy
    }
}

/// Full evaluation of a plan against every constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub g2: f64,
    pub g5: f64,
    pub g6: f64,
    pub g7: f64,
    pub g8: f64,
    pub g10: f64,
    pub g11: f64,
    pub flags: ConstraintFlags,
    pub feasible: bool,
    pub sigma_h: Option<f64>,
    pub coverage: f64,
    pub look_angles: Vec<f64>,
    pub required_rates: Vec<f64>,
    pub energy: Vec<f64>,
    pub per_pair: Vec<PairMetrics>,
}

impl ConstraintReport {
    pub fn violation_sum(&self) -> f64 {
        self.g2 + self.g5 + self.g6 + self.g7 + self.g8 + self.g10 + self.g11
    }
}

/// Re-checks a plan from raw values.
///
/// `g10` and `g11` are the hinge sums of the plan's own powers; for a
/// minimum-power plan they equal the allocation penalties.
pub fn evaluate_plan(plan: &SwarmPlan, params: &ScenarioParams) -> Result<ConstraintReport, ModelError> {
    let l = &params.limits;
    let (g, sensing) = formation_violations(&plan.formation, plan.v_y, Some(&plan.powers), params)?;
    let link = comms::link_state(&plan.formation, plan.v_y, params)?;
    let energy = comms::total_energy(&plan.powers, plan.v_y, params)?;

    let mut g10 = 0.0;
    let mut g11 = 0.0;
    let mut energy_ok = true;
    for (i, e) in energy.iter().enumerate() {
        let budget = comms::offload_power_budget(i, plan.v_y, params);
        for &p in plan.powers.row(i) {
            g10 += hinge(p - params.comm_power_max);
            g11 += hinge(p - budget);
        }
        energy_ok &= *e <= params.energy_max;
    }

    let flags = ConstraintFlags {
        altitude: plan
            .formation
            .positions()
            .iter()
            .all(|q| (l.altitude_min..=l.altitude_max).contains(&q.z)),
        look_angle: g.g2 == 0.0,
        velocity: (l.velocity_min..=l.velocity_max).contains(&plan.v_y),
        power_cap: plan
            .powers
            .values()
            .iter()
            .all(|&p| (0.0..=params.comm_power_max).contains(&p)),
        safety_distance: g.g5 == 0.0,
        coverage: g.g6 == 0.0,
        hoa: g.g7 == 0.0,
        rate: g.g8 == 0.0,
        energy: energy_ok,
    };
    let feasible = flags.all() && g10 == 0.0 && g11 == 0.0;
    Ok(ConstraintReport {
        g2: g.g2,
        g5: g.g5,
        g6: g.g6,
        g7: g.g7,
        g8: g.g8,
        g10,
        g11,
        flags,
        feasible,
        sigma_h: Some(sensing.sigma_h),
        coverage: sensing.coverage,
        look_angles: sensing.look_angles,
        required_rates: link.required_rates,
        energy,
        per_pair: sensing.pairs,
    })
}

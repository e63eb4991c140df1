use thiserror::Error;

/// Invalid scenario constants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

/// A quantity was requested outside the domain where the closed forms hold.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("UAV {index} has non-positive altitude {altitude} m")]
    NonPositiveAltitude { index: usize, altitude: f64 },
    #[error("look angle {angle} rad of UAV {index} is outside the open interval (0, pi/2)")]
    LookAngle { index: usize, angle: f64 },
    #[error("lower beam edge of UAV {index} reaches the horizon")]
    BeamBeyondHorizon { index: usize },
    #[error("UAV {index} coincides with the ground station")]
    AtGroundStation { index: usize },
    #[error("coherence must lie in (0, 1], got {0}")]
    Coherence(f64),
    #[error("cannot fuse an empty set of height errors")]
    EmptyFusion,
    #[error("swarm velocity must be positive, got {0}")]
    Velocity(f64),
    #[error("formation has {found} UAVs, scenario expects {expected}")]
    FormationSize { expected: usize, found: usize },
    #[error("power plan is {rows}x{cols}, scenario expects {uavs}x{slots}")]
    PlanShape {
        rows: usize,
        cols: usize,
        uavs: usize,
        slots: usize,
    },
}

/// Solver configuration problems detected before any computation starts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid solver setting `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error(transparent)]
    Params(#[from] ParamError),
}

impl ConfigError {
    pub(crate) fn invalid(key: &'static str, reason: impl Into<String>) -> Self {
        Self::Invalid {
            key,
            reason: reason.into(),
        }
    }
}

/// Why a solver could not return a solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("best candidate could not be re-evaluated: {0}")]
    Model(#[from] ModelError),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

impl From<ParamError> for SolveError {
    fn from(e: ParamError) -> Self {
        SolveError::Config(e.into())
    }
}

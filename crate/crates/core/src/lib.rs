pub mod baselines;
pub mod coevolution;
pub mod comms;
pub mod error;
pub mod experiment;
pub mod model;
pub mod objective;
pub mod params;
pub mod pso;
pub mod rng;
pub mod scenario;
pub mod solution;

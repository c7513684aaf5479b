//! Freeze-drying simulation (primary and secondary drying) with polynomial
//! chaos uncertainty quantification and chance-constrained shelf-temperature
//! design.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`, which is what the studies and the
//! command-line tool use.

pub mod error;
pub mod grid;
pub mod integrator;
pub mod linalg;
pub mod mc;
pub mod pce;
pub mod physics;
pub mod primary;
pub mod scalar;
pub mod secondary;
pub mod studies;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Parameters = physics::ModelParameters<f64>;
pub type Conditions = physics::ProcessConditions<f64>;
pub type Options = integrator::IntegratorOptions<f64>;
pub type PrimaryTrajectory = primary::PrimaryTrajectory<f64>;
pub type SecondaryTrajectory = secondary::SecondaryTrajectory<f64>;
pub type Scenario = mc::Scenario<f64>;
pub type Input = pce::UncertainInput<f64>;
pub type Distribution = pce::Distribution<f64>;
pub type Surrogate = pce::PceSurrogate<f64>;
pub type Empirical = pce::EmpiricalDistribution<f64>;
pub type StudyConfig = studies::StudyConfig<f64>;

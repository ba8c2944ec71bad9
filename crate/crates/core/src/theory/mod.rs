//! Explicit formulas that predict the dynamical statistics, and the
//! comparison of those predictions against exact counts.
//!
//! Everything here is a calculator: effective Chebotarev error radii, genus
//! and ramification counts, the two reference sequences `μ_n` and `τ_n`,
//! height constants and prime thresholds for integer polynomials, and the
//! characteristic thresholds of the standard example families.

mod bounds;
mod compare;
mod height;
mod sequences;

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::groups::GroupError;

pub use bounds::{
    chebotarev_error, genus_bound, kn_degree, ln_of, periodic_proportion_bound,
    predicted_image_interval, ramified_prime_bound, threshold_n, BoundParameters, PredictedImage,
    DEFAULT_M,
};
pub use compare::{
    compare, CompareOptions, ComparisonFlags, ComparisonReport, ComparisonRow, GroupHypothesis,
    Hypothesis, SCHEMA_VERSION,
};
pub use height::{
    exact_orbit_distinctness, family_threshold, height_constants, integer_critical_points,
    Congruence, CriticalOrbit, ExampleFamily, FamilyThreshold, HeightReport, IntCollision,
    OrbitDistinctness, DEFAULT_ORBIT_BITS,
};
pub use sequences::{random_map_tau, shao_mu, TauValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("bound is void: {0}")]
    BoundVoid(String),
    #[error("critical point is not a rational integer: {0}")]
    NonIntegerCritical(String),
    #[error("orbit values exceeded {budget} bits")]
    OrbitExplosion { budget: u64 },
    #[error("result would exceed {0} bits")]
    BudgetExceeded(u64),
    #[error("{0}")]
    ParameterOutOfRange(String),
}

//! Rational maps over `F_p` and the exact statistics of their functional
//! graphs on `P¹(F_p)`.

mod critical;
mod fiber;
mod graph;
mod map;

use thiserror::Error;

use crate::ffield::FieldError;

pub use critical::{
    check_orbit_separation, critical_points, Collision, CriticalPoint, CriticalPoints, OrbitReport,
};
pub use fiber::{fiber_histogram, FiberHistogram, FiberMode};
pub use graph::{build_graph, naive_image_sizes, FunctionalGraph, MAX_GRAPH_MODULUS};
pub use map::{MapSpec, MapTemplate, RationalMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("map description: {0}")]
    Parse(String),
    #[error("leading {part} coefficient vanishes mod {p}")]
    DegreeDrop { part: &'static str, p: u64 },
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("numerator and denominator share a common factor")]
    DegenerateMap,
    #[error("constant map")]
    ConstantMap,
    #[error("map is inseparable: f'g - fg' vanishes identically")]
    InseparableMap,
    #[error("p = {p} is too large for a full functional graph (max {max})")]
    FieldTooLarge { p: u64, max: u64 },
    #[error("iterate count must be at least 1")]
    ZeroIterate,
}

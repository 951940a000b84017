use thiserror::Error;

use crate::lattice::Orientation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive weight on {orientation} bond at (x={x}, y={y})")]
    NonPositiveWeight { orientation: Orientation, x: usize, y: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("{orientation} bond at (x={x}, y={y}) has weight {weight}, not one of alpha/beta")]
    NotInMixture { orientation: Orientation, x: usize, y: usize, weight: f64 },

    #[error("mixture levels must satisfy 0 < alpha < beta (alpha={alpha}, beta={beta})")]
    InvalidLevels { alpha: f64, beta: f64 },

    #[error("field is not tagged as an alpha/beta mixture")]
    NotMixture,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("direction ({0}, {1}) is not a primitive integer vector")]
    NonPrimitiveDirection(i64, i64),

    #[error("search window of {nodes} nodes exceeds the budget of {budget}")]
    WindowOverflow { nodes: usize, budget: usize },

    #[error("profile lacks the axis direction {0:?}")]
    MissingAxisDirection([i64; 2]),

    #[error("half-plane intersection is {0}")]
    DegenerateIntersection(&'static str),

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("window of {sites} free sites is too large for exhaustive enumeration (limit {limit})")]
    WindowTooLarge { sites: usize, limit: usize },

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use crate::geometry::Point2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point ({}, {}) lies outside the payoff polytope", .0.x1, .0.x2)]
    OutOfDomain(Point2),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("lines are parallel")]
    Parallel,
    #[error("angle between the base lines is degenerate")]
    DegenerateAngle,
    #[error("step index overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}

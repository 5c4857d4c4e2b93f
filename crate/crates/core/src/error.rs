use crate::prelude::*;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("pole of rational function at t = {t}")]
    Pole { t: f64 },
    #[error("ill-conditioned Stäckel system (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("classically forbidden point at index {index} (R/f = {ratio:e})")]
    Forbidden { index: usize, ratio: f64 },
    #[error("coordinates {i} and {j} collide at x = {x}")]
    Collision { i: usize, j: usize, x: f64 },
    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("interlacing violated: {0}")]
    Interlacing(String),
    #[error("expected {expected} real roots, found {found}")]
    RootCount { expected: usize, found: usize },
    #[error("{count} non-real roots")]
    NonRealRoots { count: usize },
    #[error("w changes sign inside the interval near x = {x}")]
    SignChange { x: f64 },
    #[error("trace is not periodic: {0}")]
    Aperiodic(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("degree mismatch: expected {expected}, got {got}")]
    Degree { expected: usize, got: usize },
    #[error("grid too coarse: need at least {needed} samples, have {have}")]
    GridTooCoarse { needed: usize, have: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

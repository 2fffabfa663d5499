use thiserror::Error;

use crate::models::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LisError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown field id `{0}`")]
    UnknownField(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("positivity violated: {what} = {value:e} at s = {s}, x = {x:?}")]
    Positivity { what: String, value: f64, s: f64, x: Point },
    #[error("contactness violated: {0}")]
    Contactness(String),
    #[error("Liouville condition violated: density {density:e} at s = {s}, x = {x:?}")]
    NotLiouville { density: f64, s: f64, x: Point },
    #[error("degenerate Liouville solve: |J| = {det:e} at s = {s}, x = {x:?}")]
    Degenerate { det: f64, s: f64, x: Point },
    #[error("profile not monotone: {0}")]
    NotMonotone(String),
    #[error("admissibility violated: Y·f = {value} ≤ -1 at s = {s}, x = {x:?}")]
    Admissibility { value: f64, s: f64, x: Point },
    #[error("skeleton bracket left the window [{lo}, {hi}] at x = {x:?}")]
    Bracket { lo: f64, hi: f64, x: Point },
    #[error("no convergence after {iters} iterations (last residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, LisError>;

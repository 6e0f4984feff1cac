use crate::model::MomentCase;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operation requires case {expected} but u = {u} is in case {actual}")]
    WrongCase { u: f64, expected: &'static str, actual: MomentCase },

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("maturity {t} outside the valid range (0, {t_max}]")]
    MaturityOutOfRange { t: f64, t_max: f64 },

    #[error("correlation sign not supported: {0}")]
    CorrelationSign(String),

    #[error("moment generating function explodes before t = {t} (explosion time {explosion_time})")]
    Explosion { t: f64, explosion_time: f64 },

    #[error("coefficient rescaling failed at order {order}")]
    Overflow { order: usize },

    #[error("all coefficients vanish up to order {0}")]
    DegenerateCoefficients(usize),

    #[error("corrector did not converge at t = {t}; refine the grid")]
    NonConvergence { t: f64 },

    #[error("root not bracketed on [{a}, {b}]")]
    NotBracketed { a: f64, b: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("integrand value {value} at x = {x} exceeds the declared bound {bound}")]
    BoundViolation { x: f64, value: f64, bound: f64 },

    #[error("trimming target {target:e} is not reachable with window length <= {max_len}")]
    WindowUnreachable { target: f64, max_len: f64 },

    #[error("transformed weight for nu = {nu} is not unimodal near y = {y}")]
    NotUnimodal { nu: u32, y: f64 },

    #[error("tridiagonal eigensolver did not converge for m = {m}")]
    EigenNoConvergence { m: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("root finder failed in {0}")]
    NoConvergence(&'static str),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("abscissa {x} lies outside the domain [{x_a}, {x_b}]")]
    OutsideDomain { x: f64, x_a: f64, x_b: f64 },

    #[error("state {u} lies outside the admissible range [{lo}, {hi}]")]
    StateOutOfRange { u: f64, lo: f64, hi: f64 },

    #[error("abscissa {x} lies on interface {interface}; use the one-sided traces")]
    OnInterface { x: f64, interface: usize },

    #[error("interface index {index} out of range ({count} interfaces)")]
    InterfaceIndex { index: usize, count: usize },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("germ at interface {interface} is empty")]
    EmptyGerm { interface: usize },

    #[error("unsupported coupling at interface {interface}: {reason}")]
    UnsupportedCoupling { interface: usize, reason: String },

    #[error("coupling failure at interface {interface}: no root of flux = {flux} on the admissible branch")]
    CouplingFailure { interface: usize, flux: f64 },

    #[error("time step {dt} violates the CFL bound {max_dt}")]
    Cfl { dt: f64, max_dt: f64 },

    #[error("non-finite state in cell {cell} at step {step} (t = {t})")]
    NonFinite { step: usize, cell: usize, t: f64 },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("trace sample at interface {interface} has not converged")]
    Unconverged { interface: usize },

    #[error("grid mismatch: {0}")]
    Grid(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

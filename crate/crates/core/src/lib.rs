//! Finite-volume solver and a posteriori verifier for one-dimensional scalar
//! conservation laws `u_t + F(x, u)_x = 0` whose flux jumps across a finite
//! set of static interfaces.

pub mod cli;
pub mod error;
pub mod flux_model;
pub mod fv_solver;
pub mod germ;
pub mod poly;
pub mod riemann;
pub mod scenario;
pub mod solution_file;
pub mod traces;
pub mod verify;

pub use error::{Error, Result};

//! Numerical laboratory for the one-dimensional quasilinear wave equation
//! `u_tt = (c(u)^2 u_x)_x`.

pub mod diagnostics;
pub mod error;
pub mod flux_solver;
pub mod harness;
pub mod initial_data;
pub mod riemann_solver;
pub mod wavespeed;

pub use error::{Error, Result};

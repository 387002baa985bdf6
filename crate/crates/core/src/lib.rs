//! Anticommuting (Grassmann) probability: Berezin calculus, anticommuting
//! Brownian motion, Itô integrals and SDEs, and a Feynman-Kac evaluator for
//! even second-order Hamiltonians checked against a matrix-exponential oracle.

pub mod algebra;
pub mod berezin;
mod error;
pub mod feynman_kac;
pub mod stochastic;
pub mod wiener;

pub use error::{Error, Result};

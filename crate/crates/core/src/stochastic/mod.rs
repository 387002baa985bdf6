//! Partition-level stochastic calculus: time and Itô integrals, Picard
//! solution of SDEs, and residuals of the Itô formula and integration by parts.
//!
//! Every limiting object is computed on a fixed partition; limits are taken
//! by explicit refinement studies.

mod convergence;
mod ito_formula;
mod process;
mod sde;

pub use convergence::{error_ratios, richardson, write_convergence_csv, ConvergenceRow, ConvergenceStudy};
pub use ito_formula::{
    expected_value, ibp_residual, ito_formula_residual, EvenFactor, IbpCorrection, ItoProcess, MixedFunction,
};
pub use process::{isometry_residual, AdaptedProcess};
pub use sde::{picard_solve, picard_solve_seeded, PicardSolution, SdeSpec};

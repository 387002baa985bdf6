//! Anticommuting Wiener space: heat kernel, finite-dimensional densities,
//! the expectation functional and Brownian moment identities.
//!
//! Brownian motion on a partition is built from fresh increment generators
//! `δβ[r; a]`, one block per step, with `β_{t_r}` their running sum. The
//! joint density then factorises into independent heat kernels per step, and
//! expectations are taken by integrating one step at a time.

mod expectation;
mod partition;
mod random_variable;
mod space;

pub use expectation::JOINT_CAP;
pub use partition::Partition;
pub use random_variable::{
    bridge_covariance, default_test_family, moment_table, mu_distance, write_moment_csv, MomentRow, RandomVariable,
};
pub use space::WienerSpace;

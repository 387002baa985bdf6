//! Feynman-Kac evaluation of `e^{-tH}` for even second-order Hamiltonians,
//! with a dense matrix-exponential oracle, kernel extraction and the
//! closed-form kernels of the model Hamiltonians.

mod evolve;
mod hamiltonian;
mod kernel;
mod operator;

pub use evolve::{fk_bruteforce, fk_evolve, fk_operator, transfer_operator};
pub use hamiltonian::HamiltonianSpec;
pub use kernel::{closed_form_kernel, compare_kernels, kernel_extract, ClosedForm, KernelComparison};
pub use operator::{hamiltonian_matrix, monomial_basis, semigroup_oracle, OperatorMatrix};

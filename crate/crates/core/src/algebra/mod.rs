//! Exact arithmetic in the supercommutative algebra over a finite, open-ended
//! set of anticommuting generators.
//!
//! Monomials are stored as one bitmask per `(family, slice)` block, so a
//! product is a merge of block masks plus a popcount parity for the sign.

mod element;
mod generator;
mod monomial;

pub use element::{GrassmannElement, Parity, DEFAULT_PRUNE_THRESHOLD};
pub use generator::{auxiliaries, variables, BlockKey, Family, GeneratorId, MAX_COMPONENT};
pub use monomial::MultiIndex;

/// `a · b`.
pub fn multiply(a: &GrassmannElement, b: &GrassmannElement) -> GrassmannElement {
    a * b
}

/// `a·b - (-1)^{p(a)p(b)} b·a`; zero for homogeneous inputs.
pub fn supercommutator(a: &GrassmannElement, b: &GrassmannElement) -> Option<GrassmannElement> {
    let pa = a.parity().bit()?;
    let pb = b.parity().bit()?;
    let sign = if pa * pb == 1 { -1.0 } else { 1.0 };
    Some(&(a * b) - &(b * a).scale(sign))
}

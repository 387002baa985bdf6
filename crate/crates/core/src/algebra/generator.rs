use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest component index a single (family, slice) block can hold.
pub const MAX_COMPONENT: u8 = 64;

/// Which pool a generator is drawn from.
///
/// The declaration order is part of the canonical monomial order: all
/// variable generators precede all increment generators, which precede all
/// auxiliary generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Function arguments and starting points (`η`, `ξ`).
    Variable,
    /// Brownian increments `δβ` of one partition step.
    Increment,
    /// Integration dummies and joint-density coordinates (`θ`).
    Auxiliary,
}

impl Family {
    pub(crate) fn tag(self) -> char {
        match self {
            Family::Variable => 'v',
            Family::Increment => 'd',
            Family::Auxiliary => 'a',
        }
    }

    pub(crate) fn from_tag(c: char) -> Option<Self> {
        match c {
            'v' => Some(Family::Variable),
            'd' => Some(Family::Increment),
            'a' => Some(Family::Auxiliary),
            _ => None,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Family::Variable => "η",
            Family::Increment => "δβ",
            Family::Auxiliary => "θ",
        }
    }
}

/// A (family, slice) pair; every generator of a block shares one bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub family: Family,
    pub slice: u32,
}

impl BlockKey {
    pub const fn new(family: Family, slice: u32) -> Self {
        Self { family, slice }
    }

    pub fn generator(self, component: u8) -> GeneratorId {
        GeneratorId::new(self.family, self.slice, component)
    }
}

/// Label of one anticommuting generator.
///
/// Ordering is lexicographic on `(family, slice, component)`; this is the
/// canonical order used for every monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneratorId {
    pub family: Family,
    pub slice: u32,
    pub component: u8,
}

impl GeneratorId {
    /// # Panics
    ///
    /// Panics if `component` is outside `1..=64`.
    pub fn new(family: Family, slice: u32, component: u8) -> Self {
        assert!(
            (1..=MAX_COMPONENT).contains(&component),
            "generator component {component} outside 1..={MAX_COMPONENT}"
        );
        Self {
            family,
            slice,
            component,
        }
    }

    /// Unsliced variable `η[component]`.
    pub fn variable(component: u8) -> Self {
        Self::new(Family::Variable, 0, component)
    }

    /// Brownian increment of partition step `slice` (1-based), Brownian component `component`.
    pub fn increment(slice: u32, component: u8) -> Self {
        Self::new(Family::Increment, slice, component)
    }

    pub fn auxiliary(slice: u32, component: u8) -> Self {
        Self::new(Family::Auxiliary, slice, component)
    }

    pub fn block(self) -> BlockKey {
        BlockKey::new(self.family, self.slice)
    }

    pub(crate) fn bit(self) -> u64 {
        1u64 << (self.component - 1)
    }
}

/// `n` consecutive variables `η[1..=n]`.
pub fn variables(n: usize) -> Vec<GeneratorId> {
    (1..=n).map(|c| GeneratorId::variable(c as u8)).collect()
}

/// `n` consecutive auxiliary generators of slice 0, `θ[1..=n]`.
pub fn auxiliaries(n: usize) -> Vec<GeneratorId> {
    (1..=n).map(|c| GeneratorId::auxiliary(0, c as u8)).collect()
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slice == 0 {
            write!(f, "{}[{}]", self.family.symbol(), self.component)
        } else {
            write!(f, "{}[{};{}]", self.family.symbol(), self.slice, self.component)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_family_slice_component() {
        let a = GeneratorId::variable(5);
        let b = GeneratorId::increment(1, 1);
        let c = GeneratorId::increment(1, 2);
        let d = GeneratorId::increment(2, 1);
        let e = GeneratorId::auxiliary(0, 1);
        let mut v = vec![e, d, c, b, a];
        v.sort();
        assert_eq!(v, vec![a, b, c, d, e]);
    }

    #[test]
    #[should_panic]
    fn component_zero_rejected() {
        GeneratorId::variable(0);
    }

    #[test]
    fn display() {
        assert_eq!(GeneratorId::variable(2).to_string(), "η[2]");
        assert_eq!(GeneratorId::increment(3, 1).to_string(), "δβ[3;1]");
    }
}

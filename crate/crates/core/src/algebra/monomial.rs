use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use super::generator::{BlockKey, Family, GeneratorId};

/// A strictly increasing product of generators, `η^μ`.
///
/// Stored as one bitmask per `(family, slice)` block, blocks sorted by key and
/// never empty. The empty index is the unit monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    blocks: SmallVec<[(BlockKey, u64); 2]>,
}

/// Parity of the number of pairs `(x in high, y in low)` with `x > y`,
/// for two masks of the same block.
#[inline]
fn crossing_parity(high: u64, low: u64) -> u32 {
    let mut count = 0;
    let mut m = low;
    while m != 0 {
        let y = m.trailing_zeros();
        let above = if y == 63 { 0 } else { high >> (y + 1) };
        count += above.count_ones();
        m &= m - 1;
    }
    count
}

impl MultiIndex {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn is_unit(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn from_generator(g: GeneratorId) -> Self {
        Self::from_block(g.block(), g.bit())
    }

    pub fn from_block(key: BlockKey, mask: u64) -> Self {
        let mut blocks = SmallVec::new();
        if mask != 0 {
            blocks.push((key, mask));
        }
        Self { blocks }
    }

    /// Canonical form of the ordered product `gens[0]·gens[1]⋯`, with the sign
    /// of the sorting permutation (`true` = negative). `None` if a generator repeats.
    pub fn from_product(gens: &[GeneratorId]) -> Option<(Self, bool)> {
        let mut acc = Self::unit();
        let mut negative = false;
        for &g in gens {
            let (next, neg) = acc.mul(&Self::from_generator(g))?;
            acc = next;
            negative ^= neg;
        }
        Some((acc, negative))
    }

    pub fn degree(&self) -> u32 {
        self.blocks.iter().map(|(_, m)| m.count_ones()).sum()
    }

    pub fn is_even(&self) -> bool {
        self.degree().is_multiple_of(2)
    }

    pub fn blocks(&self) -> &[(BlockKey, u64)] {
        &self.blocks
    }

    pub fn block_mask(&self, key: BlockKey) -> u64 {
        self.blocks.iter().find(|(k, _)| *k == key).map_or(0, |(_, m)| *m)
    }

    pub fn contains(&self, g: GeneratorId) -> bool {
        self.block_mask(g.block()) & g.bit() != 0
    }

    /// Generators in canonical order.
    pub fn generators(&self) -> impl Iterator<Item = GeneratorId> + '_ {
        self.blocks.iter().flat_map(|&(key, mask)| {
            let mut m = mask;
            std::iter::from_fn(move || {
                if m == 0 {
                    return None;
                }
                let bit = m.trailing_zeros();
                m &= m - 1;
                Some(key.generator(bit as u8 + 1))
            })
        })
    }

    /// Product `self · other` in canonical form with its sign
    /// (`true` = negative); `None` when a generator repeats.
    pub fn mul(&self, other: &Self) -> Option<(Self, bool)> {
        let a = &self.blocks;
        let b = &other.blocks;
        if a.is_empty() {
            return Some((other.clone(), false));
        }
        if b.is_empty() {
            return Some((self.clone(), false));
        }
        let mut out: SmallVec<[(BlockKey, u64); 2]> = SmallVec::with_capacity(a.len() + b.len());
        let mut parity = 0u32;
        let mut remaining_a = self.degree();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                remaining_a -= a[i].1.count_ones();
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                parity += b[j].1.count_ones() * remaining_a;
                out.push(b[j]);
                j += 1;
            } else {
                let (key, ma) = a[i];
                let mb = b[j].1;
                if ma & mb != 0 {
                    return None;
                }
                let later = remaining_a - ma.count_ones();
                parity += mb.count_ones() * later + crossing_parity(ma, mb);
                remaining_a -= ma.count_ones();
                out.push((key, ma | mb));
                i += 1;
                j += 1;
            }
        }
        Some((Self { blocks: out }, parity % 2 == 1))
    }

    /// Remove `g` after moving it to the front: `η^μ = ± g · rest`.
    /// Returns `rest` and whether the sign is negative, or `None` if absent.
    pub fn remove_front(&self, g: GeneratorId) -> Option<(Self, bool)> {
        let key = g.block();
        let mut before = 0u32;
        let mut out = self.blocks.clone();
        let mut found = false;
        for (idx, (k, m)) in self.blocks.iter().enumerate() {
            if *k < key {
                before += m.count_ones();
            } else if *k == key {
                if m & g.bit() == 0 {
                    return None;
                }
                before += (m & (g.bit() - 1)).count_ones();
                let rest = m & !g.bit();
                if rest == 0 {
                    out.remove(idx);
                } else {
                    out[idx].1 = rest;
                }
                found = true;
                break;
            } else {
                break;
            }
        }
        found.then(|| (Self { blocks: out }, before % 2 == 1))
    }

    /// Split off one block: `η^μ = ± rest · block`. Returns `(rest, mask, negative)`.
    pub fn split_block(&self, key: BlockKey) -> (Self, u64, bool) {
        let Some(idx) = self.blocks.iter().position(|(k, _)| *k == key) else {
            return (self.clone(), 0, false);
        };
        let mask = self.blocks[idx].1;
        let after: u32 = self.blocks[idx + 1..].iter().map(|(_, m)| m.count_ones()).sum();
        let mut rest = self.blocks.clone();
        rest.remove(idx);
        (Self { blocks: rest }, mask, (mask.count_ones() * after) % 2 == 1)
    }

    /// True when every generator lies in a block satisfying `pred`.
    pub fn all_blocks(&self, mut pred: impl FnMut(BlockKey) -> bool) -> bool {
        self.blocks.iter().all(|(k, _)| pred(*k))
    }

    /// Order by degree, then lexicographically by generator sequence.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.generators().cmp(other.generators()))
    }

    /// ASCII token form used as a JSON key, e.g. `"v0.1 v0.2"`.
    pub fn to_token(&self) -> String {
        let parts: Vec<String> = self
            .generators()
            .map(|g| format!("{}{}.{}", g.family.tag(), g.slice, g.component))
            .collect();
        parts.join(" ")
    }

    pub fn from_token(token: &str) -> Option<Self> {
        let mut gens = Vec::new();
        for part in token.split_whitespace() {
            let mut chars = part.chars();
            let family = Family::from_tag(chars.next()?)?;
            let (slice, component) = chars.as_str().split_once('.')?;
            let component: u8 = component.parse().ok()?;
            if component == 0 || component > super::generator::MAX_COMPONENT {
                return None;
            }
            gens.push(GeneratorId::new(family, slice.parse().ok()?, component));
        }
        if gens.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        Self::from_product(&gens).map(|(m, _)| m)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        for g in self.generators() {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

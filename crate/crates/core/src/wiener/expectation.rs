use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{Family, GeneratorId, GrassmannElement, MultiIndex};
use crate::berezin::{berezin_integral, substitute};
use crate::error::{Error, Result};

use super::partition::Partition;
use super::space::WienerSpace;

/// Largest step count accepted by the joint-density oracle.
pub const JOINT_CAP: usize = 6;

/// Auxiliary slice offset for the joint oracle's position variables, kept
/// clear of the low slices used elsewhere for kernel arguments.
const JOINT_SLICE_BASE: u32 = 1 << 20;

const PARALLEL_TERMS: usize = 2048;

impl WienerSpace {
    /// Integrate out the increments of one slice against `p(δ, dt)`.
    ///
    /// Every other generator is left in place; slice blocks are even whenever
    /// they survive, so no reordering sign appears.
    pub fn integrate_slice(&self, x: &GrassmannElement, slice: u32, dt: f64) -> GrassmannElement {
        let key = GeneratorId::increment(slice, 1).block();
        let reduce = |(mono, c): (&MultiIndex, &Complex64)| -> Option<(MultiIndex, Complex64)> {
            let (rest, mask, _) = mono.split_block(key);
            self.block_moment(mask, dt).map(|w| (rest, c * w))
        };
        if x.len() >= PARALLEL_TERMS {
            let pairs: Vec<_> = x
                .terms()
                .collect::<Vec<_>>()
                .into_par_iter()
                .filter_map(reduce)
                .collect();
            GrassmannElement::from_terms(pairs)
        } else {
            GrassmannElement::from_terms(x.terms().filter_map(reduce))
        }
    }

    fn check_slices(&self, partition: &Partition, x: &GrassmannElement) -> Result<()> {
        let steps = partition.steps();
        for g in x.generators() {
            if g.family == Family::Increment
                && (g.slice == 0 || g.slice as usize > steps || g.component as usize > self.dimension())
            {
                return Err(Error::UndeclaredSlice { slice: g.slice, steps });
            }
        }
        Ok(())
    }

    /// `E[X]` by elimination of the increment slices.
    ///
    /// The per-step densities are independent, so eliminating slices one by
    /// one reduces each monomial to the product of its block moments; this is
    /// done in a single pass per monomial. Generators outside the increment
    /// family survive as parameters.
    pub fn expectation(&self, partition: &Partition, x: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_slices(partition, x)?;
        let reduce = |(mono, c): (&MultiIndex, &Complex64)| -> Option<(MultiIndex, Complex64)> {
            let mut rest = mono.clone();
            let mut weight = *c;
            for &(key, _) in mono.blocks() {
                if key.family != Family::Increment {
                    continue;
                }
                let (r, mask, _) = rest.split_block(key);
                weight *= self.block_moment(mask, partition.dt(key.slice as usize))?;
                rest = r;
            }
            Some((rest, weight))
        };
        if x.len() >= PARALLEL_TERMS {
            let pairs: Vec<_> = x
                .terms()
                .collect::<Vec<_>>()
                .into_par_iter()
                .filter_map(reduce)
                .collect();
            Ok(GrassmannElement::from_terms(pairs))
        } else {
            Ok(GrassmannElement::from_terms(x.terms().filter_map(reduce)))
        }
    }

    /// `E[X]` by explicit slice-by-slice integration, last slice first.
    pub fn expectation_sequential(&self, partition: &Partition, x: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_slices(partition, x)?;
        let mut acc = x.clone();
        for r in (1..=partition.steps()).rev() {
            acc = self.integrate_slice(&acc, r as u32, partition.dt(r));
        }
        Ok(acc)
    }

    /// Scalar part of [`WienerSpace::expectation`].
    pub fn expectation_scalar(&self, partition: &Partition, x: &GrassmannElement) -> Result<Complex64> {
        Ok(self.expectation(partition, x)?.scalar_part())
    }

    /// `E[X]` with every slice live: rewrite increments as differences of
    /// positions `θ_r - θ_{r-1}`, multiply by the joint density and integrate
    /// all positions at once. Exponential in `N`; capped at [`JOINT_CAP`].
    pub fn expectation_joint(&self, partition: &Partition, x: &GrassmannElement) -> Result<GrassmannElement> {
        let steps = partition.steps();
        if steps > JOINT_CAP {
            return Err(Error::CapExceeded { steps, cap: JOINT_CAP });
        }
        self.check_slices(partition, x)?;
        let m = self.dimension();
        let slots: Vec<Vec<GeneratorId>> = (1..=steps)
            .map(|r| {
                (1..=m)
                    .map(|a| GeneratorId::auxiliary(JOINT_SLICE_BASE + r as u32, a as u8))
                    .collect()
            })
            .collect();
        let mut vars = Vec::with_capacity(m * steps);
        let mut args = Vec::with_capacity(m * steps);
        for r in 1..=steps {
            for a in 0..m {
                vars.push(GeneratorId::increment(r as u32, a as u8 + 1));
                let mut d = GrassmannElement::generator(slots[r - 1][a]);
                if r > 1 {
                    d = &d - &GrassmannElement::generator(slots[r - 2][a]);
                }
                args.push(d);
            }
        }
        let positions = substitute(x, &vars, &args);
        let density = self.finite_dimensional_density(partition, &slots)?;
        let all: Vec<GeneratorId> = slots.into_iter().flatten().collect();
        berezin_integral(&(&positions * &density), &all)
    }
}

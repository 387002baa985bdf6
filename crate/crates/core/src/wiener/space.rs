use crate::algebra::{GeneratorId, GrassmannElement, MultiIndex};
use crate::berezin::{left_derivative, SupersmoothFunction};
use crate::error::{Error, Result};

use super::partition::Partition;

/// Anticommuting Wiener space of even dimension `m`.
///
/// The covariance matrix `e` is block diagonal with `ε = [[0, 1], [-1, 0]]` blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WienerSpace {
    m: usize,
}

impl WienerSpace {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m % 2 == 1 || m > crate::algebra::MAX_COMPONENT as usize {
            return Err(Error::OddDimension(m));
        }
        Ok(Self { m })
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    /// `e^{ab}` (0-based indices).
    pub fn e(&self, a: usize, b: usize) -> f64 {
        if a / 2 != b / 2 || a == b {
            0.0
        } else if a.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `e_{ab}`, the inverse matrix of `e^{ab}`; for `ε` blocks this is `-e^{ab}`.
    pub fn e_lower(&self, a: usize, b: usize) -> f64 {
        -self.e(a, b)
    }

    /// Increment generators `δβ[slice; 1..=m]`.
    pub fn increments(&self, slice: u32) -> Vec<GeneratorId> {
        (1..=self.m).map(|a| GeneratorId::increment(slice, a as u8)).collect()
    }

    fn check_args(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: len,
            });
        }
        Ok(())
    }

    /// `½ e_{ji} z^i z^j`; for `m = 2` this is `z¹z²`.
    pub fn quadratic_form(&self, z: &[GrassmannElement]) -> Result<GrassmannElement> {
        self.check_args(z.len())?;
        let mut q = GrassmannElement::zero();
        for i in 0..self.m {
            for j in 0..self.m {
                let w = self.e_lower(j, i);
                if w != 0.0 {
                    q += &(&z[i] * &z[j]).scale(0.5 * w);
                }
            }
        }
        Ok(q)
    }

    /// `p(z, t) = t^{m/2} exp(Q(z)/t)` with odd arguments `z`.
    ///
    /// The sign of `Q` makes `∫ d^mη p(η, t) = 1` and `∂_t p = -H_F p`.
    pub fn heat_kernel_at(&self, z: &[GrassmannElement], t: f64) -> Result<GrassmannElement> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidTime(t));
        }
        let q = self.quadratic_form(z)?;
        Ok(q.scale(1.0 / t).exp()?.scale(t.powi(self.m as i32 / 2)))
    }

    /// `p(η, t)` as a function of the given target variables.
    pub fn heat_kernel(&self, target: &[GeneratorId], t: f64) -> Result<SupersmoothFunction> {
        self.check_args(target.len())?;
        let z: Vec<_> = target.iter().map(|&g| GrassmannElement::generator(g)).collect();
        SupersmoothFunction::new(self.heat_kernel_at(&z, t)?, target.to_vec())
    }

    /// `H_F F = ½ e^{ij} ∂_i ∂_j F` for a function of exactly `m` variables.
    pub fn free_hamiltonian(&self, f: &SupersmoothFunction) -> Result<SupersmoothFunction> {
        self.check_args(f.arity())?;
        let vars = f.variables();
        let mut out = GrassmannElement::zero();
        for i in 0..self.m {
            for j in 0..self.m {
                let w = self.e(i, j);
                if w != 0.0 {
                    let d = left_derivative(&left_derivative(f.body(), vars[j]), vars[i]);
                    out += &d.scale(0.5 * w);
                }
            }
        }
        SupersmoothFunction::with_parameters(out, vars.to_vec())
    }

    /// Joint density `p(θ_1, t_1) p(θ_2 - θ_1, t_2 - t_1) ⋯` of the Brownian
    /// positions at the positive nodes of `partition`; `slots[r]` holds the
    /// `m` generators for `θ_{r+1}`.
    pub fn finite_dimensional_density(
        &self,
        partition: &Partition,
        slots: &[Vec<GeneratorId>],
    ) -> Result<GrassmannElement> {
        if slots.len() != partition.steps() {
            return Err(Error::DimensionMismatch {
                expected: partition.steps(),
                found: slots.len(),
            });
        }
        let mut density = GrassmannElement::one();
        let mut previous = vec![GrassmannElement::zero(); self.m];
        for (r, slot) in slots.iter().enumerate() {
            self.check_args(slot.len())?;
            let current: Vec<_> = slot.iter().map(|&g| GrassmannElement::generator(g)).collect();
            let diff: Vec<_> = current.iter().zip(&previous).map(|(c, p)| c - p).collect();
            density = &density * &self.heat_kernel_at(&diff, partition.dt(r + 1))?;
            previous = current;
        }
        Ok(density)
    }

    /// `E[δ^μ]` for a mask over one increment block: `Δt^{pairs}` when the mask
    /// is a union of `ε`-pairs, else zero.
    pub(crate) fn block_moment(&self, mask: u64, dt: f64) -> Option<f64> {
        const LOW: u64 = 0x5555_5555_5555_5555;
        let first = mask & LOW;
        let second = (mask >> 1) & LOW;
        (first == second).then(|| dt.powi(first.count_ones() as i32))
    }

    /// Brownian positions `β_{t_r}` at every node of the partition
    /// (`β_0 = 0`), as running sums of increment generators.
    pub fn brownian_path(&self, partition: &Partition) -> Vec<Vec<GrassmannElement>> {
        let mut path = Vec::with_capacity(partition.steps() + 1);
        let mut beta = vec![GrassmannElement::zero(); self.m];
        path.push(beta.clone());
        for r in 1..=partition.steps() {
            for (b, g) in beta.iter_mut().zip(self.increments(r as u32)) {
                *b += &GrassmannElement::generator(g);
            }
            path.push(beta.clone());
        }
        path
    }

    /// Increments of step `r` as elements.
    pub fn increment_elements(&self, slice: u32) -> Vec<GrassmannElement> {
        self.increments(slice)
            .into_iter()
            .map(GrassmannElement::generator)
            .collect()
    }

    /// Increment generators of slice `r` as a monomial: `δβ[r;1]⋯δβ[r;m]`.
    pub fn increment_block(&self, slice: u32) -> MultiIndex {
        MultiIndex::from_block(
            GeneratorId::increment(slice, 1).block(),
            if self.m == 64 { u64::MAX } else { (1u64 << self.m) - 1 },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::variables;
    use crate::berezin::berezin_integral;

    #[test]
    fn e_matrix_blocks() {
        let w = WienerSpace::new(4).unwrap();
        assert_eq!(w.e(0, 1), 1.0);
        assert_eq!(w.e(1, 0), -1.0);
        assert_eq!(w.e(2, 3), 1.0);
        assert_eq!(w.e(1, 2), 0.0);
        assert!(WienerSpace::new(3).is_err());
        assert!(WienerSpace::new(0).is_err());
    }

    #[test]
    fn heat_kernel_m2_t1() {
        let w = WienerSpace::new(2).unwrap();
        let p = w.heat_kernel(&variables(2), 1.0).unwrap();
        let expected = &GrassmannElement::one() + &GrassmannElement::product_of(&variables(2));
        assert_eq!(p.body(), &expected);
    }

    #[test]
    fn heat_kernel_weight_one() {
        for m in [2, 4, 6] {
            let w = WienerSpace::new(m).unwrap();
            for t in [0.3, 0.7, 2.5] {
                let p = w.heat_kernel(&variables(m), t).unwrap();
                let weight = berezin_integral(p.body(), &variables(m)).unwrap();
                assert!((weight.scalar_part().re - 1.0).abs() < 1e-12, "m={m} t={t}");
                assert_eq!(weight.len(), 1);
            }
        }
    }

    #[test]
    fn heat_kernel_rejects_bad_input() {
        let w = WienerSpace::new(2).unwrap();
        assert!(w.heat_kernel(&variables(2), 0.0).is_err());
        assert!(w.heat_kernel(&variables(2), -1.0).is_err());
        assert!(w.heat_kernel(&variables(3), 1.0).is_err());
    }

    #[test]
    fn block_moments() {
        let w = WienerSpace::new(4).unwrap();
        assert_eq!(w.block_moment(0b0000, 0.5), Some(1.0));
        assert_eq!(w.block_moment(0b0011, 0.5), Some(0.5));
        assert_eq!(w.block_moment(0b1111, 0.5), Some(0.25));
        assert_eq!(w.block_moment(0b0001, 0.5), None);
        assert_eq!(w.block_moment(0b0110, 0.5), None);
    }
}

use crate::algebra::{Family, GrassmannElement, Parity};
use crate::error::{Error, Result};
use crate::wiener::{Partition, RandomVariable, WienerSpace};

/// Values of a `k`-component process at every node `t_0, …, t_N` of a partition.
///
/// Node `r` may only involve increments of slices `1..=r`, and every component
/// has definite parity along the whole path.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedProcess {
    partition: Partition,
    values: Vec<Vec<GrassmannElement>>,
}

impl AdaptedProcess {
    pub fn new(partition: Partition, values: Vec<Vec<GrassmannElement>>) -> Result<Self> {
        if values.len() != partition.steps() + 1 {
            return Err(Error::DimensionMismatch {
                expected: partition.steps() + 1,
                found: values.len(),
            });
        }
        let k = values[0].len();
        for (r, node) in values.iter().enumerate() {
            if node.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: node.len(),
                });
            }
            for x in node {
                if let Some(g) = x
                    .generators()
                    .find(|g| g.family == Family::Increment && g.slice as usize > r)
                {
                    return Err(Error::InvalidParameter(format!(
                        "value at node {r} depends on the future increment {g}"
                    )));
                }
            }
        }
        let process = Self { partition, values };
        for i in 0..k {
            process.component_parity(i)?;
        }
        Ok(process)
    }

    /// The same values at every node.
    pub fn constant(partition: Partition, values: Vec<GrassmannElement>) -> Result<Self> {
        let nodes = vec![values; partition.steps() + 1];
        Self::new(partition, nodes)
    }

    /// Brownian motion `β_{t_r}` with `β_0 = 0`.
    pub fn brownian(w: &WienerSpace, partition: Partition) -> Self {
        let values = w.brownian_path(&partition);
        Self { partition, values }
    }

    pub(crate) fn from_parts_unchecked(partition: Partition, values: Vec<Vec<GrassmannElement>>) -> Self {
        Self { partition, values }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn dimension(&self) -> usize {
        self.values[0].len()
    }

    pub fn node(&self, r: usize) -> &[GrassmannElement] {
        &self.values[r]
    }

    pub fn nodes(&self) -> &[Vec<GrassmannElement>] {
        &self.values
    }

    pub fn terminal(&self) -> &[GrassmannElement] {
        self.values.last().expect("non-empty")
    }

    pub fn terminal_variable(&self) -> RandomVariable {
        RandomVariable::new(self.partition.clone(), self.terminal().to_vec()).expect("adapted by construction")
    }

    /// Parity of component `i` along the path; all-zero components count as even.
    pub fn component_parity(&self, i: usize) -> Result<Parity> {
        let mut found: Option<Parity> = None;
        for node in &self.values {
            let x = &node[i];
            if x.is_zero() {
                continue;
            }
            let p = x.parity();
            if p == Parity::Mixed || found.is_some_and(|q| q != p) {
                return Err(Error::parity(
                    format!("process component {i}"),
                    "definite",
                    Parity::Mixed,
                ));
            }
            found = Some(p);
        }
        Ok(found.unwrap_or(Parity::Even))
    }

    /// `∫_0^{t_r} X_s ds ≈ Σ_{s ≤ r} (t_s - t_{s-1}) X_{t_{s-1}}`.
    pub fn time_integral(&self) -> Self {
        let k = self.dimension();
        let mut acc = vec![GrassmannElement::zero(); k];
        let mut values = Vec::with_capacity(self.values.len());
        values.push(acc.clone());
        for r in 1..=self.partition.steps() {
            let dt = self.partition.dt(r);
            for (a, x) in acc.iter_mut().zip(&self.values[r - 1]) {
                *a += &x.scale(dt);
            }
            values.push(acc.clone());
        }
        Self::from_parts_unchecked(self.partition.clone(), values)
    }

    /// `Z^i_{t_r} = Σ_{s ≤ r} δβ^a_s · C^i_{a, t_{s-1}}` for a `k × m`
    /// integrand stored row-major (`C^i_a` at component `i·m + a`).
    /// The increment stays on the left of the integrand.
    pub fn ito_integral(&self, w: &WienerSpace) -> Result<Self> {
        let m = w.dimension();
        if !self.dimension().is_multiple_of(m) {
            return Err(Error::DimensionMismatch {
                expected: m * (self.dimension() / m + 1),
                found: self.dimension(),
            });
        }
        let k = self.dimension() / m;
        let mut acc = vec![GrassmannElement::zero(); k];
        let mut values = Vec::with_capacity(self.values.len());
        values.push(acc.clone());
        for r in 1..=self.partition.steps() {
            let delta = w.increment_elements(r as u32);
            let c = &self.values[r - 1];
            for (i, z) in acc.iter_mut().enumerate() {
                for (a, d) in delta.iter().enumerate() {
                    let coefficient = &c[i * m + a];
                    if !coefficient.is_zero() {
                        *z += &(d * coefficient);
                    }
                }
            }
            values.push(acc.clone());
        }
        Ok(Self::from_parts_unchecked(self.partition.clone(), values))
    }

    /// Componentwise concatenation of two processes on the same partition.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.partition != other.partition {
            return Err(Error::InvalidParameter("processes live on different partitions".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Ok(Self::from_parts_unchecked(self.partition.clone(), values))
    }
}

/// `|E[Z^i_t Z^j_t] - Σ_r Δt_r E[(-1)^{p(Z^i)} e^{ba} C^i_a C^j_b]|` at the
/// horizon, for `Z = ∫ dβ C` with `C` a `k × m` row-major integrand.
///
/// When parameters survive the expectation the difference is measured in norm.
pub fn isometry_residual(w: &WienerSpace, c: &AdaptedProcess, i: usize, j: usize) -> Result<f64> {
    let m = w.dimension();
    let z = c.ito_integral(w)?;
    let p = c.partition();
    let sign = z.component_parity(i)?.sign().expect("definite");
    let lhs = w.expectation(p, &(&z.terminal()[i] * &z.terminal()[j]))?;
    let mut rhs = GrassmannElement::zero();
    for r in 1..=p.steps() {
        let node = c.node(r - 1);
        for a in 0..m {
            for b in 0..m {
                let e = w.e(b, a);
                if e == 0.0 {
                    continue;
                }
                let term = &node[i * m + a] * &node[j * m + b];
                rhs += &term.scale(sign * e * p.dt(r));
            }
        }
    }
    let rhs = w.expectation(p, &rhs)?;
    Ok((&lhs - &rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GeneratorId;

    #[test]
    fn time_integral_of_one() {
        let p = Partition::uniform(1.0, 5).unwrap();
        let x = AdaptedProcess::constant(p, vec![GrassmannElement::one()]).unwrap();
        let y = x.time_integral();
        for r in 0..=5 {
            assert!((y.node(r)[0].scalar_part().re - r as f64 / 5.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ito_integral_of_identity_is_brownian() {
        let w = WienerSpace::new(2).unwrap();
        let p = Partition::uniform(1.0, 4).unwrap();
        let one = GrassmannElement::one();
        let zero = GrassmannElement::zero();
        let c = AdaptedProcess::constant(p.clone(), vec![one.clone(), zero.clone(), zero, one]).unwrap();
        let z = c.ito_integral(&w).unwrap();
        assert_eq!(z.nodes(), AdaptedProcess::brownian(&w, p.clone()).nodes());
        let b = AdaptedProcess::brownian(&w, p.clone());
        let e = w
            .expectation_scalar(&p, &(&z.terminal()[0] * &b.terminal()[1]))
            .unwrap();
        assert!((e.re - 1.0).abs() < 1e-15);
        assert_eq!(isometry_residual(&w, &c, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn rejects_anticipating_values() {
        let p = Partition::uniform(1.0, 2).unwrap();
        let future = GrassmannElement::generator(GeneratorId::increment(2, 1));
        let values = vec![vec![GrassmannElement::zero()], vec![future.clone()], vec![future]];
        assert!(AdaptedProcess::new(p, values).is_err());
    }

    #[test]
    fn rejects_mixed_parity() {
        let p = Partition::uniform(1.0, 1).unwrap();
        let mixed = &GrassmannElement::one() + &GrassmannElement::generator(GeneratorId::variable(1));
        assert!(AdaptedProcess::constant(p, vec![mixed]).is_err());
    }
}

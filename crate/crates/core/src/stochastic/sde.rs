use rayon::prelude::*;

use crate::algebra::{GeneratorId, GrassmannElement, Parity};
use crate::berezin::SupersmoothFunction;
use crate::error::{Error, Result};
use crate::wiener::{mu_distance, Partition, RandomVariable, WienerSpace};

use super::process::AdaptedProcess;

/// `dζ^i = A^i(ζ) dt + dβ^a C^i_a(ζ)`, `ζ_0` given.
///
/// Drift components are odd, diffusion components even and initial values odd,
/// so every `ζ^i` stays odd. All coefficient functions share one variable list.
#[derive(Clone, Debug, PartialEq)]
pub struct SdeSpec {
    variables: Vec<GeneratorId>,
    m: usize,
    drift: Vec<SupersmoothFunction>,
    diffusion: Vec<SupersmoothFunction>,
    initial: Vec<GrassmannElement>,
}

impl SdeSpec {
    /// `diffusion` is `n × m`, row-major: `C^i_a` at index `i·m + a`.
    pub fn new(
        w: &WienerSpace,
        drift: Vec<SupersmoothFunction>,
        diffusion: Vec<SupersmoothFunction>,
        initial: Vec<GrassmannElement>,
    ) -> Result<Self> {
        let n = drift.len();
        let m = w.dimension();
        let Some(first) = drift.first() else {
            return Err(Error::InvalidParameter("an SDE needs at least one component".into()));
        };
        let variables = first.variables().to_vec();
        if variables.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: variables.len(),
            });
        }
        if diffusion.len() != n * m {
            return Err(Error::DimensionMismatch {
                expected: n * m,
                found: diffusion.len(),
            });
        }
        if initial.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: initial.len(),
            });
        }
        for f in drift.iter().chain(&diffusion) {
            if f.variables() != variables.as_slice() {
                return Err(Error::VariableMismatch(
                    "SDE coefficients use different variable lists".into(),
                ));
            }
        }
        for (i, a) in drift.iter().enumerate() {
            if !a.body().is_odd() {
                return Err(Error::parity(format!("drift A^{}", i + 1), "odd", a.parity()));
            }
        }
        for (k, c) in diffusion.iter().enumerate() {
            if !c.body().is_even() {
                return Err(Error::parity(
                    format!("diffusion C^{}_{}", k / m + 1, k % m + 1),
                    "even",
                    c.parity(),
                ));
            }
        }
        for (i, z) in initial.iter().enumerate() {
            if !z.is_odd() {
                return Err(Error::parity(format!("initial value ζ^{}", i + 1), "odd", z.parity()));
            }
        }
        Ok(Self {
            variables,
            m,
            drift,
            diffusion,
            initial,
        })
    }

    pub fn dimension(&self) -> usize {
        self.drift.len()
    }

    pub fn brownian_dimension(&self) -> usize {
        self.m
    }

    pub fn variables(&self) -> &[GeneratorId] {
        &self.variables
    }

    pub fn initial(&self) -> &[GrassmannElement] {
        &self.initial
    }

    pub fn drift(&self) -> &[SupersmoothFunction] {
        &self.drift
    }

    pub fn diffusion(&self) -> &[SupersmoothFunction] {
        &self.diffusion
    }

    /// `(A(ζ), C(ζ))` at one point.
    pub fn coefficients_at(&self, zeta: &[GrassmannElement]) -> Result<(Vec<GrassmannElement>, Vec<GrassmannElement>)> {
        let a = self.drift.iter().map(|f| f.evaluate(zeta)).collect::<Result<_>>()?;
        let c = self.diffusion.iter().map(|f| f.evaluate(zeta)).collect::<Result<_>>()?;
        Ok((a, c))
    }

    /// One Euler step `ζ + Δt A(ζ) + δβ^a C_a(ζ)` with increments of `slice`.
    pub fn euler_step(
        &self,
        w: &WienerSpace,
        zeta: &[GrassmannElement],
        slice: u32,
        dt: f64,
    ) -> Result<Vec<GrassmannElement>> {
        let (a, c) = self.coefficients_at(zeta)?;
        let delta = w.increment_elements(slice);
        let m = self.m;
        Ok(zeta
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let mut next = z + &a[i].scale(dt);
                for (b, d) in delta.iter().enumerate() {
                    next += &(d * &c[i * m + b]);
                }
                next
            })
            .collect())
    }

    /// Ornstein-Uhlenbeck: `A^i = -r ζ^i`, constant `C^i_a = c^i_a` (row-major `n × m`).
    pub fn ornstein_uhlenbeck(w: &WienerSpace, r: f64, c: &[f64], initial: Vec<GrassmannElement>) -> Result<Self> {
        let n = initial.len();
        let vars = crate::algebra::variables(n);
        let drift = vars
            .iter()
            .map(|&g| SupersmoothFunction::new(GrassmannElement::generator(g).scale(-r), vars.clone()))
            .collect::<Result<_>>()?;
        let diffusion = c
            .iter()
            .map(|&x| SupersmoothFunction::new(GrassmannElement::scalar(x), vars.clone()))
            .collect::<Result<_>>()?;
        Self::new(w, drift, diffusion, initial)
    }
}

/// Outcome of a Picard run on a fixed partition.
#[derive(Clone, Debug, PartialEq)]
pub struct PicardSolution {
    pub process: AdaptedProcess,
    /// `d_k` for `k = 1..=kmax`: the largest μ-distance between iterates `k` and `k-1` over all nodes.
    pub cauchy: Vec<f64>,
    /// First `k` at which iterate `k` equals iterate `k-1` exactly, if reached.
    pub stationary_depth: Option<usize>,
}

/// Picard iteration seeded with the constant path `ζ_0`.
pub fn picard_solve(w: &WienerSpace, sde: &SdeSpec, partition: &Partition, kmax: usize) -> Result<PicardSolution> {
    let seed = AdaptedProcess::constant(partition.clone(), sde.initial.clone())?;
    picard_solve_seeded(w, sde, &seed, kmax)
}

/// `ζ_{k+1}(t_r) = ζ_0 + Σ_{s≤r} Δt_s A(ζ_k(t_{s-1})) + Σ_{s≤r} δβ^a_s C_a(ζ_k(t_{s-1}))`,
/// from an arbitrary adapted odd seed.
pub fn picard_solve_seeded(
    w: &WienerSpace,
    sde: &SdeSpec,
    seed: &AdaptedProcess,
    kmax: usize,
) -> Result<PicardSolution> {
    if kmax == 0 {
        return Err(Error::InvalidParameter("Picard iteration needs kmax >= 1".into()));
    }
    if w.dimension() != sde.m {
        return Err(Error::DimensionMismatch {
            expected: sde.m,
            found: w.dimension(),
        });
    }
    if seed.dimension() != sde.dimension() {
        return Err(Error::DimensionMismatch {
            expected: sde.dimension(),
            found: seed.dimension(),
        });
    }
    for i in 0..seed.dimension() {
        let p = seed.component_parity(i)?;
        if p != Parity::Odd && seed.nodes().iter().any(|node| !node[i].is_zero()) {
            return Err(Error::parity("Picard seed", "odd", p));
        }
    }
    let partition = seed.partition().clone();
    let mut current = seed.clone();
    let mut cauchy = Vec::with_capacity(kmax);
    let mut stationary_depth = None;
    for k in 1..=kmax {
        let next = picard_step(w, sde, &current)?;
        let d = iterate_distance(w, &partition, &next, &current)?;
        cauchy.push(d);
        let same = next == current;
        current = next;
        if same {
            stationary_depth = Some(k);
            break;
        }
    }
    Ok(PicardSolution {
        process: current,
        cauchy,
        stationary_depth,
    })
}

fn picard_step(w: &WienerSpace, sde: &SdeSpec, current: &AdaptedProcess) -> Result<AdaptedProcess> {
    let partition = current.partition();
    let n = sde.dimension();
    let m = sde.m;
    let coefficients: Vec<_> = current.nodes()[..partition.steps()]
        .par_iter()
        .map(|zeta| sde.coefficients_at(zeta))
        .collect::<Result<_>>()?;
    let mut acc = sde.initial.clone();
    let mut values = Vec::with_capacity(partition.steps() + 1);
    values.push(acc.clone());
    for r in 1..=partition.steps() {
        let dt = partition.dt(r);
        let (a, c) = &coefficients[r - 1];
        let delta = w.increment_elements(r as u32);
        for i in 0..n {
            acc[i] += &a[i].scale(dt);
            for (b, d) in delta.iter().enumerate() {
                let cb = &c[i * m + b];
                if !cb.is_zero() {
                    acc[i] += &(d * cb);
                }
            }
        }
        values.push(acc.clone());
    }
    Ok(AdaptedProcess::from_parts_unchecked(partition.clone(), values))
}

fn iterate_distance(w: &WienerSpace, partition: &Partition, x: &AdaptedProcess, y: &AdaptedProcess) -> Result<f64> {
    let distances: Vec<f64> = (0..=partition.steps())
        .into_par_iter()
        .map(|r| {
            if x.node(r) == y.node(r) {
                return Ok(0.0);
            }
            let xr = RandomVariable::new(partition.clone(), x.node(r).to_vec())?;
            let yr = RandomVariable::new(partition.clone(), y.node(r).to_vec())?;
            mu_distance(w, &xr, &yr, None)
        })
        .collect::<Result<_>>()?;
    Ok(distances.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi(n: usize) -> Vec<GrassmannElement> {
        crate::algebra::variables(n)
            .into_iter()
            .map(GrassmannElement::generator)
            .collect()
    }

    #[test]
    fn pure_diffusion_is_shifted_brownian() {
        let w = WienerSpace::new(2).unwrap();
        let p = Partition::uniform(1.0, 3).unwrap();
        let sde = SdeSpec::ornstein_uhlenbeck(&w, 0.0, &[1.0, 0.0, 0.0, 1.0], xi(2)).unwrap();
        let sol = picard_solve(&w, &sde, &p, 10).unwrap();
        let beta = w.brownian_path(&p);
        for r in 0..=3 {
            for i in 0..2 {
                assert_eq!(sol.process.node(r)[i], &xi(2)[i] + &beta[r][i]);
            }
        }
        assert_eq!(sol.stationary_depth, Some(2));
        assert_eq!(*sol.cauchy.last().unwrap(), 0.0);
    }

    #[test]
    fn ou_depth_bounded_by_steps() {
        let w = WienerSpace::new(2).unwrap();
        let p = Partition::uniform(1.0, 6).unwrap();
        let sde = SdeSpec::ornstein_uhlenbeck(&w, 1.0, &[1.0, 0.0, 0.0, 1.0], xi(2)).unwrap();
        let sol = picard_solve(&w, &sde, &p, 20).unwrap();
        let depth = sol.stationary_depth.unwrap();
        assert!(depth <= 8, "depth {depth}");
        assert!(sol.cauchy[..depth - 1].iter().all(|&d| d > 0.0));
    }

    #[test]
    fn rejects_bad_parities() {
        let w = WienerSpace::new(2).unwrap();
        let even_start = vec![
            GrassmannElement::one(),
            GrassmannElement::generator(GeneratorId::variable(2)),
        ];
        assert!(SdeSpec::ornstein_uhlenbeck(&w, 1.0, &[1.0, 0.0, 0.0, 1.0], even_start).is_err());
        let vars = crate::algebra::variables(1);
        let odd_c = SupersmoothFunction::new(GrassmannElement::generator(vars[0]), vars.clone()).unwrap();
        let zero = SupersmoothFunction::zero(vars.clone());
        assert!(SdeSpec::new(&w, vec![zero.clone()], vec![odd_c, zero], xi(1)).is_err());
    }
}

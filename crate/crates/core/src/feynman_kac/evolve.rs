use num_complex::Complex64;

use crate::algebra::GrassmannElement;
use crate::berezin::{substitute, SupersmoothFunction};
use crate::error::{Error, Result};
use crate::wiener::{Partition, JOINT_CAP};

use super::hamiltonian::HamiltonianSpec;
use super::operator::OperatorMatrix;

/// Euler step `φ^j(x) = x^j - iΔt α^j(x) + δβ^a c^j_a(x)` with increments of `slice`,
/// evaluated at `x` (elements standing for the variables).
fn euler_map(h: &HamiltonianSpec, x: &[GrassmannElement], slice: u32, dt: f64) -> Vec<GrassmannElement> {
    let vars = h.variables();
    let delta = h.wiener().increment_elements(slice);
    let at = |f: &GrassmannElement| substitute(f, &vars, x);
    (0..h.n())
        .map(|j| {
            let mut next = &x[j] + &at(&h.alpha()[j]).scale(Complex64::new(0.0, -dt));
            for (a, d) in delta.iter().enumerate() {
                let c = at(h.c(j, a));
                if !c.is_zero() {
                    next += &(d * &c);
                }
            }
            next
        })
        .collect()
}

/// One-step transfer operator `(T G)(x) = E_δ[exp(-Δt v(x)) G(φ(x, δ))]`.
pub fn transfer_operator(h: &HamiltonianSpec, dt: f64) -> Result<OperatorMatrix> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTime(dt));
    }
    let vars = h.variables();
    let x: Vec<_> = vars.iter().map(|&g| GrassmannElement::generator(g)).collect();
    let phi = euler_map(h, &x, 1, dt);
    let weight = h.potential().scale(-dt).exp()?;
    OperatorMatrix::from_map(vars.clone(), |g| {
        let moved = &weight * &substitute(g, &vars, &phi);
        h.wiener().integrate_slice(&moved, 1, dt)
    })
}

/// Transfer operators keyed by step length; uniform grids build one.
struct TransferCache<'a> {
    h: &'a HamiltonianSpec,
    entries: Vec<(f64, OperatorMatrix)>,
}

impl<'a> TransferCache<'a> {
    fn new(h: &'a HamiltonianSpec) -> Self {
        Self { h, entries: Vec::new() }
    }

    fn get(&mut self, dt: f64) -> Result<&OperatorMatrix> {
        let idx = match self.entries.iter().position(|(s, _)| *s == dt) {
            Some(i) => i,
            None => {
                self.entries.push((dt, transfer_operator(self.h, dt)?));
                self.entries.len() - 1
            }
        };
        Ok(&self.entries[idx].1)
    }
}

/// `E[exp(-Σ_r Δt_r v(ζ_{r-1})) F(ζ_t)]` as a function of the start point `ξ`,
/// by backward application of one-step transfer operators.
pub fn fk_evolve(h: &HamiltonianSpec, f: &SupersmoothFunction, partition: &Partition) -> Result<SupersmoothFunction> {
    let vars = h.variables();
    if f.variables() != vars.as_slice() {
        return Err(Error::VariableMismatch(
            "F must be a function of the Hamiltonian's variables".into(),
        ));
    }
    let mut cache = TransferCache::new(h);
    let identity = OperatorMatrix::identity(vars.clone());
    let mut g = identity.coordinates(f.body())?;
    for r in (1..=partition.steps()).rev() {
        g = cache.get(partition.dt(r))?.matrix() * g;
    }
    SupersmoothFunction::new(identity.element(&g), vars)
}

/// The same expectation with the whole path live at once: forward Euler
/// elements in all increments, the product of weights, and a full Berezin
/// integral against the joint density. Capped at `N <= 6`.
pub fn fk_bruteforce(
    h: &HamiltonianSpec,
    f: &SupersmoothFunction,
    partition: &Partition,
) -> Result<SupersmoothFunction> {
    let steps = partition.steps();
    if steps > JOINT_CAP {
        return Err(Error::CapExceeded { steps, cap: JOINT_CAP });
    }
    let vars = h.variables();
    if f.variables() != vars.as_slice() {
        return Err(Error::VariableMismatch(
            "F must be a function of the Hamiltonian's variables".into(),
        ));
    }
    let mut zeta: Vec<_> = vars.iter().map(|&g| GrassmannElement::generator(g)).collect();
    let mut weight = GrassmannElement::one();
    for r in 1..=steps {
        let dt = partition.dt(r);
        let v = substitute(h.potential(), &vars, &zeta);
        weight = &weight * &v.scale(-dt).exp()?;
        zeta = euler_map(h, &zeta, r as u32, dt);
    }
    let integrand = &weight * &f.evaluate(&zeta)?;
    let value = h.wiener().expectation_joint(partition, &integrand)?;
    SupersmoothFunction::new(value, vars)
}

/// The map `F ↦ fk_evolve(h, F, partition)` as a matrix: the ordered product
/// of transfer operators, first step leftmost.
pub fn fk_operator(h: &HamiltonianSpec, partition: &Partition) -> Result<OperatorMatrix> {
    let mut cache = TransferCache::new(h);
    let mut total = OperatorMatrix::identity(h.variables());
    for r in 1..=partition.steps() {
        total = total.compose(cache.get(partition.dt(r))?)?;
    }
    Ok(total)
}

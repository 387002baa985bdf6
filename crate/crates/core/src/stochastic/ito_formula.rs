use crate::algebra::{GeneratorId, GrassmannElement, Parity};
use crate::berezin::{left_derivative, substitute};
use crate::error::{Error, Result};
use crate::wiener::{Partition, WienerSpace};

use super::process::AdaptedProcess;
use super::sde::SdeSpec;

/// A smooth function of `p` commuting variables, evaluated on even elements.
#[derive(Clone, Debug, PartialEq)]
pub enum EvenFactor {
    /// `Σ coefficient · Π x_k^{e_k}`.
    Polynomial(Vec<(Vec<u32>, f64)>),
    /// `scale · exp(Σ rate_k x_k)`.
    Exponential { scale: f64, rates: Vec<f64> },
}

impl EvenFactor {
    pub fn constant(c: f64) -> Self {
        EvenFactor::Polynomial(vec![(Vec::new(), c)])
    }

    fn derivative(&self, k: usize) -> Self {
        match self {
            EvenFactor::Polynomial(terms) => EvenFactor::Polynomial(
                terms
                    .iter()
                    .filter_map(|(e, c)| {
                        let power = e.get(k).copied().unwrap_or(0);
                        (power > 0).then(|| {
                            let mut e = e.clone();
                            e[k] -= 1;
                            (e, c * power as f64)
                        })
                    })
                    .collect(),
            ),
            EvenFactor::Exponential { scale, rates } => EvenFactor::Exponential {
                scale: scale * rates.get(k).copied().unwrap_or(0.0),
                rates: rates.clone(),
            },
        }
    }

    fn evaluate(&self, x: &[GrassmannElement]) -> Result<GrassmannElement> {
        match self {
            EvenFactor::Polynomial(terms) => {
                let mut out = GrassmannElement::zero();
                for (e, c) in terms {
                    let mut term = GrassmannElement::scalar(*c);
                    for (k, &power) in e.iter().enumerate() {
                        term = &term * &x[k].pow(power);
                    }
                    out += &term;
                }
                Ok(out)
            }
            EvenFactor::Exponential { scale, rates } => {
                let mut arg = GrassmannElement::zero();
                for (k, &rate) in rates.iter().enumerate() {
                    arg += &x[k].scale(rate);
                }
                Ok(arg.exp()?.scale(*scale))
            }
        }
    }
}

/// `F(x, y) = Σ_k f_k(x) G_k(y)` with `x` commuting and `y` anticommuting
/// variables. Variable `i < p` is even, the rest are the odd `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedFunction {
    even_arity: usize,
    odd_variables: Vec<GeneratorId>,
    terms: Vec<(EvenFactor, GrassmannElement)>,
}

impl MixedFunction {
    pub fn new(even_arity: usize, odd_variables: Vec<GeneratorId>, terms: Vec<(EvenFactor, GrassmannElement)>) -> Self {
        Self {
            even_arity,
            odd_variables,
            terms,
        }
    }

    /// A function of the odd variables only.
    pub fn odd(odd_variables: Vec<GeneratorId>, body: GrassmannElement) -> Self {
        Self::new(0, odd_variables, vec![(EvenFactor::constant(1.0), body)])
    }

    pub fn arity(&self) -> usize {
        self.even_arity + self.odd_variables.len()
    }

    /// `∂F/∂x_i` for even `i`, the left derivative for odd `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let terms = if i < self.even_arity {
            self.terms.iter().map(|(f, g)| (f.derivative(i), g.clone())).collect()
        } else {
            let v = self.odd_variables[i - self.even_arity];
            self.terms
                .iter()
                .map(|(f, g)| (f.clone(), left_derivative(g, v)))
                .filter(|(_, g)| !g.is_zero())
                .collect()
        };
        Self::new(self.even_arity, self.odd_variables.clone(), terms)
    }

    /// `F(X)`: even arguments first, then odd ones.
    pub fn evaluate(&self, args: &[GrassmannElement]) -> Result<GrassmannElement> {
        if args.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: args.len(),
            });
        }
        let (x, y) = args.split_at(self.even_arity);
        let mut out = GrassmannElement::zero();
        for (f, g) in &self.terms {
            out += &(&f.evaluate(x)? * &substitute(g, &self.odd_variables, y));
        }
        Ok(out)
    }
}

/// A process `X` with the drift and diffusion that generated it on a partition:
/// `X_{t_r} = X_{t_{r-1}} + Δt A_{t_{r-1}} + δβ^a_r C_{a, t_{r-1}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ItoProcess {
    values: AdaptedProcess,
    drift: AdaptedProcess,
    diffusion: AdaptedProcess,
    parities: Vec<Parity>,
    m: usize,
}

impl ItoProcess {
    pub fn new(
        w: &WienerSpace,
        values: AdaptedProcess,
        drift: AdaptedProcess,
        diffusion: AdaptedProcess,
        parities: Vec<Parity>,
    ) -> Result<Self> {
        let k = values.dimension();
        let m = w.dimension();
        if drift.dimension() != k || diffusion.dimension() != k * m || parities.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: drift.dimension(),
            });
        }
        for (i, &p) in parities.iter().enumerate() {
            if p == Parity::Mixed {
                return Err(Error::parity(format!("Itô process component {i}"), "definite", p));
            }
            let found = values.component_parity(i)?;
            if found != p && values.nodes().iter().any(|n| !n[i].is_zero()) {
                return Err(Error::parity(format!("Itô process component {i}"), p.as_str(), found));
            }
        }
        Ok(Self {
            values,
            drift,
            diffusion,
            parities,
            m,
        })
    }

    /// Solution of an SDE with its coefficients evaluated along the path.
    pub fn from_sde(w: &WienerSpace, sde: &SdeSpec, solution: &AdaptedProcess) -> Result<Self> {
        let mut drift = Vec::with_capacity(solution.nodes().len());
        let mut diffusion = Vec::with_capacity(solution.nodes().len());
        for node in solution.nodes() {
            let (a, c) = sde.coefficients_at(node)?;
            drift.push(a);
            diffusion.push(c);
        }
        let p = solution.partition().clone();
        Self::new(
            w,
            solution.clone(),
            AdaptedProcess::new(p.clone(), drift)?,
            AdaptedProcess::new(p, diffusion)?,
            vec![Parity::Odd; solution.dimension()],
        )
    }

    /// `X_t = t`: unit drift, no diffusion.
    pub fn time(w: &WienerSpace, partition: &Partition) -> Result<Self> {
        let values = partition
            .nodes()
            .iter()
            .map(|&t| vec![GrassmannElement::scalar(t)])
            .collect();
        let p = partition.clone();
        Self::new(
            w,
            AdaptedProcess::new(p.clone(), values)?,
            AdaptedProcess::constant(p.clone(), vec![GrassmannElement::one()])?,
            AdaptedProcess::constant(p, vec![GrassmannElement::zero(); w.dimension()])?,
            vec![Parity::Even],
        )
    }

    /// Components of `self` followed by those of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            values: self.values.concat(&other.values)?,
            drift: self.drift.concat(&other.drift)?,
            diffusion: self.diffusion.concat(&other.diffusion)?,
            parities: self.parities.iter().chain(&other.parities).copied().collect(),
            m: self.m,
        })
    }

    pub fn values(&self) -> &AdaptedProcess {
        &self.values
    }

    pub fn partition(&self) -> &Partition {
        self.values.partition()
    }

    pub fn dimension(&self) -> usize {
        self.values.dimension()
    }

    fn c(&self, r: usize, i: usize, a: usize) -> &GrassmannElement {
        &self.diffusion.node(r)[i * self.m + a]
    }

    /// `max_r |X_r - X_{r-1} - Δt A_{r-1} - δβ_r C_{r-1}|`; zero for a consistent process.
    pub fn consistency_defect(&self, w: &WienerSpace) -> f64 {
        let p = self.partition();
        let mut worst: f64 = 0.0;
        for r in 1..=p.steps() {
            let delta = w.increment_elements(r as u32);
            for i in 0..self.dimension() {
                let mut step = &self.values.node(r)[i] - &self.values.node(r - 1)[i];
                step = &step - &self.drift.node(r - 1)[i].scale(p.dt(r));
                for (a, d) in delta.iter().enumerate() {
                    step = &step - &(d * self.c(r - 1, i, a));
                }
                worst = worst.max(step.norm());
            }
        }
        worst
    }
}

/// `‖E[F(X_t)] - E[F(X_0) + Σ_r ΔX^i_r ∂_iF(X_{r-1}) + ½ Σ_r Δt_r (-1)^{p(X^i)} e^{ab} C^i_b C^j_a ∂_j∂_iF(X_{r-1})]‖`.
pub fn ito_formula_residual(w: &WienerSpace, f: &MixedFunction, x: &ItoProcess) -> Result<f64> {
    if f.arity() != x.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.arity(),
            found: x.dimension(),
        });
    }
    for i in 0..x.dimension() {
        let expected = if i < f.even_arity { Parity::Even } else { Parity::Odd };
        if x.parities[i] != expected {
            return Err(Error::parity(
                format!("argument {i} of F"),
                expected.as_str(),
                x.parities[i],
            ));
        }
    }
    let p = x.partition();
    let k = x.dimension();
    let m = x.m;
    let first: Vec<MixedFunction> = (0..k).map(|i| f.derivative(i)).collect();
    let second: Vec<Vec<MixedFunction>> = first
        .iter()
        .map(|fi| (0..k).map(|j| fi.derivative(j)).collect())
        .collect();
    let mut rhs = f.evaluate(x.values.node(0))?;
    for r in 1..=p.steps() {
        let before = x.values.node(r - 1);
        let after = x.values.node(r);
        for i in 0..k {
            let dx = &after[i] - &before[i];
            rhs += &(&dx * &first[i].evaluate(before)?);
        }
        for i in 0..k {
            let sign = x.parities[i].sign().expect("definite");
            for j in 0..k {
                let mut weight = GrassmannElement::zero();
                for a in 0..m {
                    for b in 0..m {
                        let e = w.e(a, b);
                        if e != 0.0 {
                            weight += &(x.c(r - 1, i, b) * x.c(r - 1, j, a)).scale(e);
                        }
                    }
                }
                if weight.is_zero() {
                    continue;
                }
                let d2 = second[i][j].evaluate(before)?;
                rhs += &(&weight * &d2).scale(0.5 * sign * p.dt(r));
            }
        }
    }
    let lhs = f.evaluate(x.values.terminal())?;
    Ok(w.expectation(p, &(&lhs - &rhs))?.norm())
}

/// Second-order correction used in the integration-by-parts check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbpCorrection {
    /// `(-1)^{p(X¹)} e^{ba} C¹_a C²_b dt`, obtained from the Itô formula with `F = y¹y²`.
    FromItoFormula,
    /// `½ (-1)^{p(X¹)} e^{ab} C¹_a C²_b dt`.
    HalfSymmetric,
}

/// `‖E[X¹_t X²_t] - E[X¹_0X²_0 + Σ_r (X¹ ΔX² + ΔX¹ X² + correction)]‖`
/// for the first two components of `x`.
pub fn ibp_residual(w: &WienerSpace, x: &ItoProcess, correction: IbpCorrection) -> Result<f64> {
    if x.dimension() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: x.dimension(),
        });
    }
    let p = x.partition();
    let m = x.m;
    let sign = x.parities[0].sign().expect("definite");
    let node = |r: usize, i: usize| &x.values.node(r)[i];
    let mut rhs = node(0, 0) * node(0, 1);
    for r in 1..=p.steps() {
        let d1 = node(r, 0) - node(r - 1, 0);
        let d2 = node(r, 1) - node(r - 1, 1);
        rhs += &(node(r - 1, 0) * &d2);
        rhs += &(&d1 * node(r - 1, 1));
        for a in 0..m {
            for b in 0..m {
                let weight = match correction {
                    IbpCorrection::FromItoFormula => sign * w.e(b, a),
                    IbpCorrection::HalfSymmetric => 0.5 * sign * w.e(a, b),
                };
                if weight != 0.0 {
                    rhs += &(x.c(r - 1, 0, a) * x.c(r - 1, 1, b)).scale(weight * p.dt(r));
                }
            }
        }
    }
    let lhs = x.values.terminal()[0].clone() * x.values.terminal()[1].clone();
    Ok(w.expectation(p, &(&lhs - &rhs))?.norm())
}

/// `E[F(X_t)]` with `F` applied at the terminal node.
pub fn expected_value(w: &WienerSpace, f: &MixedFunction, x: &ItoProcess) -> Result<GrassmannElement> {
    w.expectation(x.partition(), &f.evaluate(x.values.terminal())?)
}

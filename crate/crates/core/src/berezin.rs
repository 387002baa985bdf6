//! Differentiation, Berezin integration, substitution and integral kernels
//! for supersmooth functions.
//!
//! Conventions fixed here and used everywhere downstream:
//!
//! * `∂/∂η^j` is the left derivative: move `η^j` to the front of the monomial
//!   (one sign flip per generator it passes) and drop it.
//! * `∫ d^kθ` extracts, from each monomial written as `rest · θ¹θ²⋯θᵏ`, the
//!   coefficient `rest`, so that `∫ d^kθ θ¹⋯θᵏ = +1`. For even `k`, the side
//!   on which the `θ` block is collected does not matter.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::algebra::{GeneratorId, GrassmannElement, MultiIndex, Parity};
use crate::error::{Error, Result};

/// Left derivative of an element with respect to one generator.
pub fn left_derivative(a: &GrassmannElement, g: GeneratorId) -> GrassmannElement {
    GrassmannElement::from_terms(
        a.terms()
            .filter_map(|(m, c)| m.remove_front(g).map(|(rest, neg)| (rest, if neg { -c } else { *c }))),
    )
}

/// Berezin integral over `vars` (ordered), without any bound-variable check.
///
/// Returns `Err` only if `vars` repeats a generator.
pub fn berezin_integral(a: &GrassmannElement, vars: &[GeneratorId]) -> Result<GrassmannElement> {
    let (top, sorting_negative) = MultiIndex::from_product(vars)
        .ok_or_else(|| Error::VariableMismatch("integration variables repeat a generator".into()))?;
    let mut out = Vec::new();
    for (m, c) in a.terms() {
        if !vars.iter().all(|&g| m.contains(g)) {
            continue;
        }
        let mut rest = m.clone();
        for &g in vars {
            rest = rest.remove_front(g).expect("checked above").0;
        }
        let (check, neg) = rest.mul(&top).expect("disjoint by construction");
        debug_assert_eq!(&check, m);
        let negative = neg ^ sorting_negative;
        out.push((rest, if negative { -c } else { *c }));
    }
    Ok(GrassmannElement::from_terms(out))
}

/// Replace each generator `vars[i]` by `args[i]`, multiplying factors in
/// canonical monomial order. Other generators are left untouched.
pub fn substitute(a: &GrassmannElement, vars: &[GeneratorId], args: &[GrassmannElement]) -> GrassmannElement {
    debug_assert_eq!(vars.len(), args.len());
    let index: HashMap<GeneratorId, usize> = vars.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut out = GrassmannElement::zero();
    let mut untouched = Vec::new();
    for (m, c) in a.terms() {
        if !m.generators().any(|g| index.contains_key(&g)) {
            untouched.push((m.clone(), *c));
            continue;
        }
        let mut acc = GrassmannElement::scalar(*c);
        for g in m.generators() {
            acc = match index.get(&g) {
                Some(&i) => &acc * &args[i],
                None => &acc * &GrassmannElement::generator(g),
            };
            if acc.is_zero() {
                break;
            }
        }
        out += &acc;
    }
    &out + &GrassmannElement::from_terms(untouched)
}

fn check_distinct(vars: &[GeneratorId]) -> Result<()> {
    let mut sorted = vars.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::VariableMismatch("repeated variable".into()));
    }
    Ok(())
}

fn check_odd_args(args: &[GrassmannElement], context: &str) -> Result<()> {
    for a in args {
        if !a.is_odd() {
            return Err(Error::parity(context, "odd", a.parity()));
        }
    }
    Ok(())
}

/// A multinomial in a declared, ordered set of anticommuting variables.
///
/// Generators outside `variables` may appear in the body only when the function
/// was built with [`SupersmoothFunction::with_parameters`]; they then act as
/// coefficients from the larger algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct SupersmoothFunction {
    body: GrassmannElement,
    variables: Vec<GeneratorId>,
}

impl SupersmoothFunction {
    /// Strict constructor: every generator of `body` must be a bound variable.
    pub fn new(body: GrassmannElement, variables: Vec<GeneratorId>) -> Result<Self> {
        check_distinct(&variables)?;
        if let Some(g) = body.generators().find(|g| !variables.contains(g)) {
            return Err(Error::UnknownVariable(g));
        }
        Ok(Self { body, variables })
    }

    /// Body may carry other generators, which are treated as free parameters.
    pub fn with_parameters(body: GrassmannElement, variables: Vec<GeneratorId>) -> Result<Self> {
        check_distinct(&variables)?;
        Ok(Self { body, variables })
    }

    pub fn zero(variables: Vec<GeneratorId>) -> Self {
        Self {
            body: GrassmannElement::zero(),
            variables,
        }
    }

    pub fn body(&self) -> &GrassmannElement {
        &self.body
    }

    pub fn into_body(self) -> GrassmannElement {
        self.body
    }

    pub fn variables(&self) -> &[GeneratorId] {
        &self.variables
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn parity(&self) -> Parity {
        self.body.parity()
    }

    fn require_bound(&self, g: GeneratorId) -> Result<()> {
        if self.variables.contains(&g) {
            Ok(())
        } else {
            Err(Error::UnknownVariable(g))
        }
    }

    /// `∂F/∂η^j`.
    pub fn partial_derivative(&self, j: GeneratorId) -> Result<Self> {
        self.require_bound(j)?;
        Ok(Self {
            body: left_derivative(&self.body, j),
            variables: self.variables.clone(),
        })
    }

    /// Apply `∂_{j_1}` first, then `∂_{j_2}`, and so on.
    pub fn derivatives(&self, order: &[GeneratorId]) -> Result<Self> {
        order.iter().try_fold(self.clone(), |f, &j| f.partial_derivative(j))
    }

    /// `∫ d^kη F` over a subset of the bound variables.
    pub fn berezin_integrate(&self, vars: &[GeneratorId]) -> Result<GrassmannElement> {
        for &g in vars {
            self.require_bound(g)?;
        }
        berezin_integral(&self.body, vars)
    }

    /// `F(args)`: substitute `args[i]` for the i-th variable.
    pub fn evaluate(&self, args: &[GrassmannElement]) -> Result<GrassmannElement> {
        if args.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: args.len(),
            });
        }
        Ok(substitute(&self.body, &self.variables, args))
    }

    /// The same function written in another set of variables.
    pub fn rename(&self, variables: Vec<GeneratorId>) -> Result<Self> {
        if variables.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: variables.len(),
            });
        }
        check_distinct(&variables)?;
        let args: Vec<_> = variables.iter().map(|&g| GrassmannElement::generator(g)).collect();
        Ok(Self {
            body: substitute(&self.body, &self.variables, &args),
            variables,
        })
    }

    /// Norm of `F(ξ+η) - Σ_μ η^μ ∂_{μ̃}F(ξ)`, where `∂_{μ̃}` applies
    /// `∂_{μ_1}` first. The identity is exact, so this measures round-off.
    pub fn taylor_residual(&self, xi: &[GrassmannElement], eta: &[GrassmannElement]) -> Result<f64> {
        let n = self.arity();
        for v in [xi, eta] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        check_odd_args(xi, "Taylor base point")?;
        check_odd_args(eta, "Taylor displacement")?;

        let shifted: Vec<_> = xi.iter().zip(eta).map(|(a, b)| a + b).collect();
        let lhs = self.evaluate(&shifted)?;

        let mut rhs = GrassmannElement::zero();
        for subset in 0u64..(1 << n) {
            let order: Vec<GeneratorId> = (0..n)
                .filter(|i| subset >> i & 1 == 1)
                .map(|i| self.variables[i])
                .collect();
            let derivative = self.derivatives(&order)?;
            if derivative.body.is_zero() {
                continue;
            }
            let mut term = GrassmannElement::one();
            for i in (0..n).filter(|i| subset >> i & 1 == 1) {
                term = &term * &eta[i];
            }
            rhs += &(&term * &derivative.evaluate(xi)?);
        }
        Ok(lhs.sub_with_threshold(&rhs, 0.0).norm())
    }

    /// Coefficient of `η^μ` for the monomial over the given variable subset.
    pub fn coefficient_of(&self, vars: &[GeneratorId]) -> Complex64 {
        match MultiIndex::from_product(vars) {
            Some((m, neg)) => {
                let c = self.body.coefficient(&m);
                if neg {
                    -c
                } else {
                    c
                }
            }
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// `K(η, θ)` acting by `(Kf)(η) = ∫ d^mθ K(η, θ) f(θ)`.
///
/// Both variable sets are carried explicitly; nothing is renamed implicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralKernel {
    body: GrassmannElement,
    outputs: Vec<GeneratorId>,
    inputs: Vec<GeneratorId>,
}

impl IntegralKernel {
    pub fn new(body: GrassmannElement, outputs: Vec<GeneratorId>, inputs: Vec<GeneratorId>) -> Result<Self> {
        check_distinct(&outputs)?;
        check_distinct(&inputs)?;
        if outputs.iter().any(|g| inputs.contains(g)) {
            return Err(Error::VariableMismatch("kernel variable sets overlap".into()));
        }
        Ok(Self { body, outputs, inputs })
    }

    /// Grassmann delta `Π_i (η^i - θ^i)`.
    pub fn delta(outputs: Vec<GeneratorId>, inputs: Vec<GeneratorId>) -> Result<Self> {
        if outputs.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: outputs.len(),
                found: inputs.len(),
            });
        }
        let mut body = GrassmannElement::one();
        for (&o, &i) in outputs.iter().zip(&inputs) {
            body = &body * &(&GrassmannElement::generator(o) - &GrassmannElement::generator(i));
        }
        Self::new(body, outputs, inputs)
    }

    pub fn body(&self) -> &GrassmannElement {
        &self.body
    }

    pub fn outputs(&self) -> &[GeneratorId] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[GeneratorId] {
        &self.inputs
    }

    pub fn apply(&self, f: &SupersmoothFunction) -> Result<SupersmoothFunction> {
        if f.variables() != self.inputs.as_slice() {
            return Err(Error::VariableMismatch(
                "function variables differ from kernel inputs".into(),
            ));
        }
        let integrand = &self.body * f.body();
        SupersmoothFunction::with_parameters(berezin_integral(&integrand, &self.inputs)?, self.outputs.clone())
    }

    /// `(self ∘ first)(η, θ) = ∫ dφ self(η, φ) first(φ, θ)`.
    pub fn compose(&self, first: &IntegralKernel) -> Result<IntegralKernel> {
        if self.inputs != first.outputs {
            return Err(Error::VariableMismatch(
                "composed kernels must share the contracted variable set".into(),
            ));
        }
        let body = berezin_integral(&(&self.body * &first.body), &self.inputs)?;
        IntegralKernel::new(body, self.outputs.clone(), first.inputs.clone())
    }

    pub fn max_abs_diff(&self, other: &IntegralKernel) -> f64 {
        self.body.max_abs_diff(&other.body)
    }
}

/// The constant `s` with `apply(δ, f) = s·f` for every `f` in `m` variables.
pub fn delta_sign(m: usize) -> f64 {
    let out = crate::algebra::variables(m);
    let inp: Vec<_> = (1..=m).map(|c| GeneratorId::auxiliary(0, c as u8)).collect();
    let delta = IntegralKernel::delta(out, inp.clone()).expect("distinct variable sets");
    let one = SupersmoothFunction::new(GrassmannElement::one(), inp).expect("constant");
    delta.apply(&one).expect("matching variables").body().scalar_part().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{auxiliaries, variables};

    fn eta(c: u8) -> GrassmannElement {
        GrassmannElement::generator(GeneratorId::variable(c))
    }

    fn f2(body: GrassmannElement) -> SupersmoothFunction {
        SupersmoothFunction::new(body, variables(2)).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let f = f2(&eta(1) * &eta(2));
        let d1 = f.partial_derivative(GeneratorId::variable(1)).unwrap();
        assert_eq!(d1.body(), &eta(2));
        let d2 = f.partial_derivative(GeneratorId::variable(2)).unwrap();
        assert_eq!(d2.body(), &-eta(1));
        let one = f2(GrassmannElement::one());
        assert!(one
            .partial_derivative(GeneratorId::variable(1))
            .unwrap()
            .body()
            .is_zero());
        assert!(matches!(
            f.partial_derivative(GeneratorId::variable(3)),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn strict_constructor_rejects_foreign_generators() {
        let body = &eta(1) * &GrassmannElement::generator(GeneratorId::auxiliary(0, 1));
        assert!(SupersmoothFunction::new(body.clone(), variables(2)).is_err());
        assert!(SupersmoothFunction::with_parameters(body, variables(2)).is_ok());
    }

    #[test]
    fn integration_examples() {
        let vars = variables(2);
        assert_eq!(
            f2(&eta(1) * &eta(2)).berezin_integrate(&vars).unwrap(),
            GrassmannElement::one()
        );
        assert!(f2(GrassmannElement::one()).berezin_integrate(&vars).unwrap().is_zero());
        // reversed measure order flips the sign
        let rev = [vars[1], vars[0]];
        assert_eq!(
            f2(&eta(1) * &eta(2)).berezin_integrate(&rev).unwrap(),
            -GrassmannElement::one()
        );
    }

    #[test]
    fn taylor_for_product() {
        let f = f2(&eta(1) * &eta(2));
        let xi: Vec<_> = (1..=2)
            .map(|c| GrassmannElement::generator(GeneratorId::auxiliary(1, c)))
            .collect();
        let th: Vec<_> = (1..=2)
            .map(|c| GrassmannElement::generator(GeneratorId::auxiliary(2, c)))
            .collect();
        assert_eq!(f.taylor_residual(&xi, &th).unwrap(), 0.0);
        assert_eq!(f2(GrassmannElement::one()).taylor_residual(&xi, &th).unwrap(), 0.0);
        let even = vec![&xi[0] * &xi[1], xi[1].clone()];
        assert!(f.taylor_residual(&even, &th).is_err());
    }

    #[test]
    fn delta_reproduces_basis() {
        let out = variables(2);
        let inp = auxiliaries(2);
        let delta = IntegralKernel::delta(out.clone(), inp.clone()).unwrap();
        let s = delta_sign(2);
        assert_eq!(s, 1.0);
        for mask in 0..4u8 {
            let gens: Vec<_> = (0..2).filter(|i| mask >> i & 1 == 1).collect();
            let f_in: Vec<_> = gens.iter().map(|&i| inp[i]).collect();
            let f_out: Vec<_> = gens.iter().map(|&i| out[i]).collect();
            let f = SupersmoothFunction::new(GrassmannElement::product_of(&f_in), inp.clone()).unwrap();
            let got = delta.apply(&f).unwrap();
            assert_eq!(got.body(), &GrassmannElement::product_of(&f_out).scale(s));
        }
        let zero = SupersmoothFunction::zero(inp);
        assert!(delta.apply(&zero).unwrap().body().is_zero());
    }

    #[test]
    fn apply_rejects_mismatched_variables() {
        let delta = IntegralKernel::delta(variables(2), auxiliaries(2)).unwrap();
        assert!(delta.apply(&f2(eta(1))).is_err());
        assert!(IntegralKernel::new(GrassmannElement::one(), variables(2), variables(2)).is_err());
    }
}

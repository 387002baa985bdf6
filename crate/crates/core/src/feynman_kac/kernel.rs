use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{auxiliaries, variables, GrassmannElement, MultiIndex};
use crate::berezin::IntegralKernel;
use crate::error::{Error, Result};
use crate::wiener::WienerSpace;

use super::operator::OperatorMatrix;

/// The kernel `K(ξ, η)` with `∫ d^nη K(ξ, η) f(η) = (U f)(ξ)` for every `f`.
///
/// Outputs `ξ` are the operator's variables, inputs `η` the slice-0 auxiliaries.
/// With `η^{μᶜ} η^μ = s(μ) η^{full}`, the coefficient of `ξ^ν η^{μᶜ}` is `s(μ) U_{νμ}`.
pub fn kernel_extract(u: &OperatorMatrix) -> Result<IntegralKernel> {
    let n = u.variables().len();
    let inputs = auxiliaries(n);
    let (full, _) = MultiIndex::from_product(&inputs).expect("distinct");
    let basis = u.basis();
    let mut terms = Vec::new();
    for (col, mu) in basis.iter().enumerate() {
        let mu_eta = rename_to(mu, u, &inputs);
        let complement: Vec<_> = inputs.iter().copied().filter(|g| !mu_eta.contains(*g)).collect();
        let (comp, neg_c) = MultiIndex::from_product(&complement).expect("distinct");
        let (product, neg_p) = comp.mul(&mu_eta).expect("disjoint");
        debug_assert_eq!(product, full);
        let s = if neg_c ^ neg_p { -1.0 } else { 1.0 };
        for (row, nu) in basis.iter().enumerate() {
            let c = u.matrix()[(row, col)];
            if c.norm() == 0.0 {
                continue;
            }
            let (mono, neg) = nu.mul(&comp).expect("disjoint families");
            terms.push((mono, if neg { -c * s } else { c * s }));
        }
    }
    IntegralKernel::new(GrassmannElement::from_terms(terms), u.variables().to_vec(), inputs)
}

fn rename_to(mu: &MultiIndex, u: &OperatorMatrix, targets: &[crate::algebra::GeneratorId]) -> MultiIndex {
    let gens: Vec<_> = mu
        .generators()
        .map(|g| targets[u.variables().iter().position(|&v| v == g).expect("basis generator")])
        .collect();
    MultiIndex::from_product(&gens).expect("distinct").0
}

/// Closed-form kernels of the model Hamiltonians, in `(ξ, η)` with `ξ = η[1..=2]` and `η` the slice-0 auxiliaries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ClosedForm {
    Flat,
    FlatPotential {
        lambda: f64,
    },
    #[serde(rename = "ou")]
    OrnsteinUhlenbeck {
        r: f64,
        c: f64,
    },
    Oscillator,
    Quartic {
        b: f64,
        c: f64,
    },
}

impl ClosedForm {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::Flat => "flat",
            ClosedForm::FlatPotential { .. } => "flat_potential",
            ClosedForm::OrnsteinUhlenbeck { .. } => "ou",
            ClosedForm::Oscillator => "oscillator",
            ClosedForm::Quartic { .. } => "quartic",
        }
    }
}

/// Expand a closed-form kernel at time `t`.
pub fn closed_form_kernel(form: ClosedForm, t: f64) -> Result<IntegralKernel> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let xi: Vec<_> = variables(2).into_iter().map(GrassmannElement::generator).collect();
    let eta: Vec<_> = auxiliaries(2).into_iter().map(GrassmannElement::generator).collect();
    let one = GrassmannElement::one();
    let xx = &xi[0] * &xi[1];
    let ee = &eta[0] * &eta[1];
    let cross = &(&xi[0] * &eta[1]) + &(&eta[0] * &xi[1]);
    let heat = || -> Result<GrassmannElement> {
        let diff: Vec<_> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
        WienerSpace::new(2)?.heat_kernel_at(&diff, t)
    };
    let body = match form {
        ClosedForm::Flat => heat()?,
        ClosedForm::FlatPotential { lambda } => heat()?.scale((-lambda * t).exp()),
        ClosedForm::OrnsteinUhlenbeck { r, c } => {
            if r == 0.0 {
                return Err(Error::InvalidParameter("the OU kernel needs r != 0".into()));
            }
            let decay = (-r * t).exp();
            let mut k = ee.clone();
            k = &k - &cross.scale(decay);
            k = &k + &one.scale(c * c / (2.0 * r) * (1.0 - decay * decay));
            &k + &xx.scale(decay * decay)
        }
        ClosedForm::Oscillator => {
            let (s, ch) = (t.sinh(), t.cosh());
            let exponent = &(&xx + &ee).scale(ch / s) - &cross.scale(1.0 / s);
            exponent.exp()?.scale(s)
        }
        ClosedForm::Quartic { b, c } => {
            if b == 0.0 {
                return Err(Error::InvalidParameter("the quartic kernel needs b != 0".into()));
            }
            let delta = &(&eta[0] - &xi[0]) * &(&eta[1] - &xi[1]);
            &delta + &one.scale(c * c / (2.0 * b) * ((-2.0 * b * t).exp() - 1.0))
        }
    };
    IntegralKernel::new(body, variables(2), auxiliaries(2))
}

/// Coefficient-wise comparison of two kernels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelComparison {
    pub max_abs_diff: f64,
    /// Monomial with the largest difference, `None` when the kernels agree exactly.
    pub worst_monomial: Option<String>,
    pub reference: [f64; 2],
    pub candidate: [f64; 2],
}

pub fn compare_kernels(reference: &IntegralKernel, candidate: &IntegralKernel) -> KernelComparison {
    let (a, b) = (reference.body(), candidate.body());
    let mut worst: Option<(&MultiIndex, f64)> = None;
    for (m, _) in a.terms().chain(b.terms()) {
        let d = (a.coefficient(m) - b.coefficient(m)).norm();
        if worst.is_none_or(|(_, w)| d > w) {
            worst = Some((m, d));
        }
    }
    match worst {
        Some((m, d)) if d > 0.0 => KernelComparison {
            max_abs_diff: d,
            worst_monomial: Some(m.to_string()),
            reference: pair(a.coefficient(m)),
            candidate: pair(b.coefficient(m)),
        },
        _ => KernelComparison {
            max_abs_diff: 0.0,
            worst_monomial: None,
            reference: [0.0, 0.0],
            candidate: [0.0, 0.0],
        },
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

use num_complex::Complex64;

use crate::algebra::{variables, Family, GeneratorId, GrassmannElement};
use crate::berezin::{left_derivative, SupersmoothFunction};
use crate::error::{Error, Result};
use crate::stochastic::SdeSpec;
use crate::wiener::WienerSpace;

/// `H = ½ g^{kj} ∂_j ∂_k + i α^j ∂_j + v` with `g^{kj} = e^{ab} c^k_b c^j_a`.
///
/// Coefficients are elements in the variables `η[1..=n]`: `v` and `c^j_a` even,
/// `α^j` odd. `c` is stored row-major, `c^j_a` at index `j·m + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    name: String,
    n: usize,
    w: WienerSpace,
    potential: GrassmannElement,
    alpha: Vec<GrassmannElement>,
    c: Vec<GrassmannElement>,
}

impl HamiltonianSpec {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        m: usize,
        potential: GrassmannElement,
        alpha: Vec<GrassmannElement>,
        c: Vec<GrassmannElement>,
    ) -> Result<Self> {
        let w = WienerSpace::new(m)?;
        if n == 0 || n > 8 {
            return Err(Error::InvalidParameter(format!(
                "variable count must lie in 1..=8, got {n}"
            )));
        }
        if alpha.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: alpha.len(),
            });
        }
        if c.len() != n * m {
            return Err(Error::DimensionMismatch {
                expected: n * m,
                found: c.len(),
            });
        }
        let check_vars = |x: &GrassmannElement| -> Result<()> {
            match x
                .generators()
                .find(|g| g.family != Family::Variable || g.slice != 0 || g.component as usize > n)
            {
                Some(g) => Err(Error::UnknownVariable(g)),
                None => Ok(()),
            }
        };
        check_vars(&potential)?;
        if !potential.is_even() {
            return Err(Error::parity("potential v", "even", potential.parity()));
        }
        for (j, a) in alpha.iter().enumerate() {
            check_vars(a)?;
            if !a.is_odd() {
                return Err(Error::parity(format!("drift α^{}", j + 1), "odd", a.parity()));
            }
        }
        for (k, x) in c.iter().enumerate() {
            check_vars(x)?;
            if !x.is_even() {
                return Err(Error::parity(
                    format!("diffusion c^{}_{}", k / m + 1, k % m + 1),
                    "even",
                    x.parity(),
                ));
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            w,
            potential,
            alpha,
            c,
        })
    }

    /// `H = ∂₁∂₂`.
    pub fn flat() -> Self {
        Self::flat_with_potential(0.0)
    }

    /// `H = ∂₁∂₂ + λ`.
    pub fn flat_with_potential(lambda: f64) -> Self {
        let name = if lambda == 0.0 { "flat" } else { "flat_potential" };
        Self::new(name, 2, 2, GrassmannElement::scalar(lambda), zeros(2), identity_c(1.0))
            .expect("valid by construction")
    }

    /// `H = c²∂₁∂₂ + r(η¹∂₁ + η²∂₂)`: `α^j = -i r η^j`, `c^j_a = c δ^j_a`.
    pub fn ornstein_uhlenbeck(r: f64, c: f64) -> Self {
        let alpha = eta(2).iter().map(|x| x.scale(Complex64::new(0.0, -r))).collect();
        Self::new("ou", 2, 2, GrassmannElement::zero(), alpha, identity_c(c)).expect("valid by construction")
    }

    /// `H = ∂₁∂₂ - η¹η²`.
    pub fn harmonic_oscillator() -> Self {
        let e = eta(2);
        Self::new("oscillator", 2, 2, -(&e[0] * &e[1]), zeros(2), identity_c(1.0)).expect("valid by construction")
    }

    /// `H = (c² + 2b η¹η²) ∂₂∂₁`, generated by `c¹₁ = γ`, `c²₂ = -γ` with
    /// `γ = c + (b/c) η¹η²`.
    pub fn quartic(b: f64, c: f64) -> Result<Self> {
        let gamma = quartic_gamma(b, c)?;
        let zero = GrassmannElement::zero();
        Self::new(
            "quartic",
            2,
            2,
            zero.clone(),
            zeros(2),
            vec![gamma.clone(), zero.clone(), zero, -gamma],
        )
    }

    /// The quartic example with both diffusion entries equal to `γ`. This
    /// generates `-(c² + 2b η¹η²) ∂₂∂₁`.
    pub fn quartic_symmetric_diffusion(b: f64, c: f64) -> Result<Self> {
        let gamma = quartic_gamma(b, c)?;
        let zero = GrassmannElement::zero();
        Self::new(
            "quartic_symmetric_diffusion",
            2,
            2,
            zero.clone(),
            zeros(2),
            vec![gamma.clone(), zero.clone(), zero, gamma],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.w.dimension()
    }

    pub fn wiener(&self) -> &WienerSpace {
        &self.w
    }

    pub fn variables(&self) -> Vec<GeneratorId> {
        variables(self.n)
    }

    pub fn potential(&self) -> &GrassmannElement {
        &self.potential
    }

    pub fn alpha(&self) -> &[GrassmannElement] {
        &self.alpha
    }

    /// `c^j_a` (0-based `j`, `a`).
    pub fn c(&self, j: usize, a: usize) -> &GrassmannElement {
        &self.c[j * self.m() + a]
    }

    pub fn diffusion(&self) -> &[GrassmannElement] {
        &self.c
    }

    /// `g^{kj} = e^{ab} c^k_b c^j_a`.
    pub fn metric(&self, k: usize, j: usize) -> GrassmannElement {
        let m = self.m();
        let mut g = GrassmannElement::zero();
        for a in 0..m {
            for b in 0..m {
                let e = self.w.e(a, b);
                if e != 0.0 {
                    g += &(self.c(k, b) * self.c(j, a)).scale(e);
                }
            }
        }
        g
    }

    /// `H F` for an element in `η[1..=n]` (other generators ride along as parameters).
    pub fn apply(&self, f: &GrassmannElement) -> GrassmannElement {
        let vars = self.variables();
        let mut out = &self.potential * f;
        for j in 0..self.n {
            let d = left_derivative(f, vars[j]);
            if d.is_zero() {
                continue;
            }
            out += &(&self.alpha[j] * &d).scale(Complex64::i());
            for k in 0..self.n {
                let g = self.metric(k, j);
                if g.is_zero() {
                    continue;
                }
                let d2 = left_derivative(&left_derivative(f, vars[k]), vars[j]);
                out += &(&g * &d2).scale(0.5);
            }
        }
        out
    }

    /// The diffusion `dζ^j = -i α^j(ζ) dt + dβ^a c^j_a(ζ)` started at `initial`.
    pub fn diffusion_sde(&self, initial: Vec<GrassmannElement>) -> Result<SdeSpec> {
        let vars = self.variables();
        let drift = self
            .alpha
            .iter()
            .map(|a| SupersmoothFunction::new(a.scale(Complex64::new(0.0, -1.0)), vars.clone()))
            .collect::<Result<_>>()?;
        let diffusion = self
            .c
            .iter()
            .map(|x| SupersmoothFunction::new(x.clone(), vars.clone()))
            .collect::<Result<_>>()?;
        SdeSpec::new(&self.w, drift, diffusion, initial)
    }
}

fn eta(n: usize) -> Vec<GrassmannElement> {
    variables(n).into_iter().map(GrassmannElement::generator).collect()
}

fn zeros(n: usize) -> Vec<GrassmannElement> {
    vec![GrassmannElement::zero(); n]
}

fn identity_c(c: f64) -> Vec<GrassmannElement> {
    let zero = GrassmannElement::zero();
    vec![
        GrassmannElement::scalar(c),
        zero.clone(),
        zero,
        GrassmannElement::scalar(c),
    ]
}

fn quartic_gamma(b: f64, c: f64) -> Result<GrassmannElement> {
    if c == 0.0 || !c.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "quartic example needs finite b and c != 0, got b={b}, c={c}"
        )));
    }
    let e = eta(2);
    Ok(&GrassmannElement::scalar(c) + &(&e[0] * &e[1]).scale(b / c))
}

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::{GeneratorId, GrassmannElement, MultiIndex};
use crate::berezin::SupersmoothFunction;
use crate::error::{Error, Result};

use super::hamiltonian::HamiltonianSpec;

/// A linear map on functions of `n` variables, as a `2ⁿ × 2ⁿ` matrix on the
/// monomial basis ordered by (degree, lexicographic).
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    variables: Vec<GeneratorId>,
    basis: Vec<MultiIndex>,
    matrix: DMatrix<Complex64>,
}

/// Monomials in `vars`, ordered by (degree, lexicographic).
pub fn monomial_basis(vars: &[GeneratorId]) -> Vec<MultiIndex> {
    let n = vars.len();
    let mut subsets: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .map(|s| {
            let gens: Vec<_> = s.iter().map(|&i| vars[i]).collect();
            MultiIndex::from_product(&gens).expect("distinct").0
        })
        .collect()
}

impl OperatorMatrix {
    pub fn new(variables: Vec<GeneratorId>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let basis = monomial_basis(&variables);
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: matrix.nrows(),
            });
        }
        Ok(Self {
            variables,
            basis,
            matrix,
        })
    }

    pub fn identity(variables: Vec<GeneratorId>) -> Self {
        let d = 1 << variables.len();
        Self::new(variables, DMatrix::identity(d, d)).expect("square")
    }

    /// Matrix of a linear map given by its action on basis monomials.
    pub fn from_map(variables: Vec<GeneratorId>, f: impl Fn(&GrassmannElement) -> GrassmannElement) -> Result<Self> {
        let basis = monomial_basis(&variables);
        let d = basis.len();
        let mut matrix = DMatrix::zeros(d, d);
        let index = basis_index(&basis);
        for (col, mono) in basis.iter().enumerate() {
            let image = f(&GrassmannElement::monomial(mono.clone(), 1.0));
            for (m, c) in image.terms() {
                let row = *index.get(m).ok_or_else(|| outside_basis(m))?;
                matrix[(row, col)] = *c;
            }
        }
        Ok(Self {
            variables,
            basis,
            matrix,
        })
    }

    pub fn variables(&self) -> &[GeneratorId] {
        &self.variables
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of an element that lives in the span of the basis.
    pub fn coordinates(&self, f: &GrassmannElement) -> Result<DVector<Complex64>> {
        let index = basis_index(&self.basis);
        let mut v = DVector::zeros(self.basis.len());
        for (m, c) in f.terms() {
            v[*index.get(m).ok_or_else(|| outside_basis(m))?] = *c;
        }
        Ok(v)
    }

    pub fn element(&self, v: &DVector<Complex64>) -> GrassmannElement {
        GrassmannElement::from_terms(self.basis.iter().cloned().zip(v.iter().copied()))
    }

    pub fn apply_element(&self, f: &GrassmannElement) -> Result<GrassmannElement> {
        Ok(self.element(&(&self.matrix * self.coordinates(f)?)))
    }

    pub fn apply(&self, f: &SupersmoothFunction) -> Result<SupersmoothFunction> {
        if f.variables() != self.variables.as_slice() {
            return Err(Error::VariableMismatch(
                "function and operator use different variables".into(),
            ));
        }
        SupersmoothFunction::new(self.apply_element(f.body())?, self.variables.clone())
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.variables != other.variables {
            return Err(Error::VariableMismatch("operators use different variables".into()));
        }
        Self::new(self.variables.clone(), &self.matrix * &other.matrix)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn basis_index(basis: &[MultiIndex]) -> BTreeMap<&MultiIndex, usize> {
    basis.iter().enumerate().map(|(i, m)| (m, i)).collect()
}

fn outside_basis(m: &MultiIndex) -> Error {
    Error::VariableMismatch(format!("monomial {m} lies outside the operator basis"))
}

/// Column `μ` holds the coordinates of `H η^μ`.
pub fn hamiltonian_matrix(h: &HamiltonianSpec) -> OperatorMatrix {
    OperatorMatrix::from_map(h.variables(), |f| h.apply(f)).expect("H preserves the variable algebra")
}

/// `exp(-t H)` by scaling and squaring with a truncated Taylor series.
pub fn semigroup_oracle(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let a = h.matrix.scale(-t);
    let norm = (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale(0.5f64.powi(squarings));
    let d = a.nrows();
    let mut sum = DMatrix::<Complex64>::identity(d, d);
    let mut term = DMatrix::<Complex64>::identity(d, d);
    for k in 1..=40 {
        term = (&term * &b).unscale(k as f64);
        sum += &term;
        if term.iter().all(|z| z.norm() < 1e-18) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    OperatorMatrix::new(h.variables.clone(), sum)
}

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::generator::GeneratorId;
use super::monomial::MultiIndex;
use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped after every operation.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-14;

/// Grading of an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    /// `0` for even, `1` for odd, `None` when mixed.
    pub fn bit(self) -> Option<u32> {
        match self {
            Parity::Even => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }

    /// `(-1)^{p}` for a homogeneous parity.
    pub fn sign(self) -> Option<f64> {
        self.bit().map(|b| if b == 0 { 1.0 } else { -1.0 })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sparse multinomial `Σ_μ F_μ η^μ` with complex coefficients.
///
/// Values are immutable in spirit: arithmetic returns new elements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GrassmannElement {
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl GrassmannElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: impl Into<Complex64>) -> Self {
        Self::monomial(MultiIndex::unit(), c)
    }

    pub fn generator(g: GeneratorId) -> Self {
        Self::monomial(MultiIndex::from_generator(g), 1.0)
    }

    pub fn monomial(m: MultiIndex, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if c.norm() >= DEFAULT_PRUNE_THRESHOLD {
            terms.insert(m, c);
        }
        Self { terms }
    }

    /// Ordered product of generators, e.g. `[η2, η1]` gives `-η1η2`.
    pub fn product_of(gens: &[GeneratorId]) -> Self {
        match MultiIndex::from_product(gens) {
            Some((m, neg)) => Self::monomial(m, if neg { -1.0 } else { 1.0 }),
            None => Self::zero(),
        }
    }

    /// Sum of terms; repeated monomials accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Self {
        let mut out = BTreeMap::new();
        for (m, c) in terms {
            *out.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self::pruned(out, DEFAULT_PRUNE_THRESHOLD)
    }

    fn pruned(mut terms: BTreeMap<MultiIndex, Complex64>, threshold: f64) -> Self {
        terms.retain(|_, c| c.norm() >= threshold);
        Self { terms }
    }

    pub fn prune(&self, threshold: f64) -> Self {
        Self::pruned(self.terms.clone(), threshold)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (MultiIndex, Complex64)> {
        self.terms.into_iter()
    }

    /// Number of nonzero terms.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// Coefficient of the unit monomial (the "body").
    pub fn scalar_part(&self) -> Complex64 {
        self.coefficient(&MultiIndex::unit())
    }

    /// Grading; the zero element counts as even.
    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            if m.is_even() {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.is_zero() || self.parity() == Parity::Odd
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// `Σ_μ |F_μ|`.
    pub fn norm(&self) -> f64 {
        self.terms.values().fold(0.0, |s, c| s + c.norm())
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub_with_threshold(other, 0.0).max_abs_coefficient()
    }

    /// Highest monomial degree present (0 for scalars and zero).
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn generators(&self) -> impl Iterator<Item = GeneratorId> + '_ {
        self.terms.keys().flat_map(|m| m.generators())
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self::pruned(
            self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
            DEFAULT_PRUNE_THRESHOLD,
        )
    }

    pub fn add_with_threshold(&self, other: &Self, threshold: f64) -> Self {
        let mut out = self.terms.clone();
        for (m, c) in &other.terms {
            *out.entry(m.clone()).or_default() += c;
        }
        Self::pruned(out, threshold)
    }

    pub fn sub_with_threshold(&self, other: &Self, threshold: f64) -> Self {
        let mut out = self.terms.clone();
        for (m, c) in &other.terms {
            *out.entry(m.clone()).or_default() -= c;
        }
        Self::pruned(out, threshold)
    }

    /// Supercommutative product with an explicit prune threshold.
    pub fn mul_with_threshold(&self, other: &Self, threshold: f64) -> Self {
        let mut out: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.mul(mb) {
                    let c = ca * cb;
                    *out.entry(m).or_default() += if neg { -c } else { c };
                }
            }
        }
        Self::pruned(out, threshold)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `e^a` for an even argument; the series terminates by nilpotency.
    pub fn exp(&self) -> Result<Self> {
        let parity = self.parity();
        if parity != Parity::Even {
            return Err(Error::parity("grassmann exponential", "even", parity));
        }
        let body = self.scalar_part();
        let mut nilpotent = self.terms.clone();
        nilpotent.remove(&MultiIndex::unit());
        let nilpotent = Self { terms: nilpotent };

        let mut sum = Self::one();
        let mut term = Self::one();
        let mut k = 1.0;
        loop {
            term = (&term * &nilpotent).scale(1.0 / k);
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
            k += 1.0;
        }
        Ok(sum.scale(body.exp()))
    }

    /// Keep only the terms whose monomial satisfies `pred`.
    pub fn filter(&self, mut pred: impl FnMut(&MultiIndex) -> bool) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    /// Terms sorted by degree, then generator order.
    pub fn sorted_terms(&self) -> Vec<(&MultiIndex, &Complex64)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.canonical_cmp(b.0));
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("element serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))
    }
}

impl From<f64> for GrassmannElement {
    fn from(c: f64) -> Self {
        Self::scalar(c)
    }
}

impl From<Complex64> for GrassmannElement {
    fn from(c: Complex64) -> Self {
        Self::scalar(c)
    }
}

impl From<GeneratorId> for GrassmannElement {
    fn from(g: GeneratorId) -> Self {
        Self::generator(g)
    }
}

impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: Self) -> GrassmannElement {
        self.add_with_threshold(rhs, DEFAULT_PRUNE_THRESHOLD)
    }
}

impl Add for GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: Self) -> GrassmannElement {
        &self + &rhs
    }
}

impl AddAssign<&GrassmannElement> for GrassmannElement {
    fn add_assign(&mut self, rhs: &GrassmannElement) {
        for (m, c) in &rhs.terms {
            *self.terms.entry(m.clone()).or_default() += c;
        }
        self.terms.retain(|_, c| c.norm() >= DEFAULT_PRUNE_THRESHOLD);
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: Self) -> GrassmannElement {
        self.sub_with_threshold(rhs, DEFAULT_PRUNE_THRESHOLD)
    }
}

impl Sub for GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: Self) -> GrassmannElement {
        &self - &rhs
    }
}

impl Mul for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: Self) -> GrassmannElement {
        self.mul_with_threshold(rhs, DEFAULT_PRUNE_THRESHOLD)
    }
}

impl Mul for GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: Self) -> GrassmannElement {
        &self * &rhs
    }
}

impl Mul<f64> for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: f64) -> GrassmannElement {
        self.scale(rhs)
    }
}

impl Mul<Complex64> for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: Complex64) -> GrassmannElement {
        self.scale(rhs)
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(-1.0)
    }
}

impl Neg for GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        -&self
    }
}

fn fmt_real(x: f64) -> String {
    format!("{x:?}")
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            // Pull a leading minus out of single-part coefficients.
            let (negative, body) = if c.im == 0.0 {
                (c.re < 0.0, fmt_real(c.re.abs()))
            } else if c.re == 0.0 {
                (c.im < 0.0, format!("{}i", fmt_real(c.im.abs())))
            } else {
                let sign = if c.im < 0.0 { '-' } else { '+' };
                (
                    false,
                    format!("({} {} {}i)", fmt_real(c.re), sign, fmt_real(c.im.abs())),
                )
            };
            match (idx, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
            if !m.is_unit() {
                write!(f, "·{m}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for GrassmannElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (m, c) in self.sorted_terms() {
            map.serialize_entry(&m.to_token(), &[c.re, c.im])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GrassmannElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ElementVisitor;

        impl<'de> Visitor<'de> for ElementVisitor {
            type Value = GrassmannElement;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from monomial tokens to [re, im]")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
                let mut terms = BTreeMap::new();
                while let Some((key, [re, im])) = access.next_entry::<String, [f64; 2]>()? {
                    let m = MultiIndex::from_token(&key)
                        .ok_or_else(|| de::Error::custom(format!("bad monomial token {key:?}")))?;
                    if terms.insert(m, Complex64::new(re, im)).is_some() {
                        return Err(de::Error::custom(format!("duplicate monomial {key:?}")));
                    }
                }
                Ok(GrassmannElement { terms })
            }
        }

        deserializer.deserialize_map(ElementVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GeneratorId;
    use proptest::prelude::*;

    fn eta(c: u8) -> GrassmannElement {
        GrassmannElement::generator(GeneratorId::variable(c))
    }

    fn eta_prod(cs: &[u8]) -> GrassmannElement {
        let gens: Vec<_> = cs.iter().map(|&c| GeneratorId::variable(c)).collect();
        GrassmannElement::product_of(&gens)
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(&eta(1) * &eta(2), eta_prod(&[1, 2]));
        assert!((&eta(1) * &eta(1)).is_zero());
        assert_eq!(&eta(2) * &eta(1), -eta_prod(&[1, 2]));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(GrassmannElement::zero().exp().unwrap(), GrassmannElement::one());
        let a = eta_prod(&[1, 2]);
        assert_eq!(a.exp().unwrap(), &GrassmannElement::one() + &a);

        let b = eta_prod(&[3, 4]);
        // truncated-series oracle: (1 + a)(1 + b) since a, b commute and square to zero
        let expected = &(&GrassmannElement::one() + &a) * &(&GrassmannElement::one() + &b);
        assert_eq!((&a + &b).exp().unwrap(), expected);
        let gens: Vec<_> = (1..=4).map(GeneratorId::variable).collect();
        let (top, _) = MultiIndex::from_product(&gens).unwrap();
        assert_eq!(expected.coefficient(&top).re, 1.0);
        assert_eq!(expected.len(), 4);
    }

    #[test]
    fn exp_with_body() {
        let a = &GrassmannElement::scalar(2.0) + &eta_prod(&[1, 2]);
        let e = a.exp().unwrap();
        assert!((e.scalar_part().re - 2f64.exp()).abs() < 1e-15);
        assert!((e.norm() - 2.0 * 2f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn exp_rejects_odd_and_mixed() {
        assert!(eta(1).exp().is_err());
        assert!((&GrassmannElement::one() + &eta(1)).exp().is_err());
    }

    #[test]
    fn norm_examples() {
        let a = &GrassmannElement::one() + &eta(1).scale(2.0);
        assert_eq!(a.norm(), 3.0);
        assert_eq!(GrassmannElement::zero().norm(), 0.0);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(eta_prod(&[1, 2]).parity(), Parity::Even);
        assert_eq!((&eta(1) + &eta_prod(&[1, 2, 3])).parity(), Parity::Odd);
        assert_eq!((&GrassmannElement::one() + &eta(1)).parity(), Parity::Mixed);
    }

    #[test]
    fn rendering() {
        let a = &GrassmannElement::scalar(3.0) + &eta_prod(&[1, 2]).scale(Complex64::new(0.0, -1.0));
        assert_eq!(a.to_string(), "3.0 - 1.0i·η[1]η[2]");
        assert_eq!(GrassmannElement::zero().to_string(), "0");
        assert_eq!((-eta(2)).to_string(), "-1.0·η[2]");
    }

    #[test]
    fn json_is_keyed_by_token() {
        let a = &GrassmannElement::scalar(Complex64::new(0.5, -2.0)) + &eta_prod(&[1, 2]);
        assert_eq!(a.to_json(), r#"{"":[0.5,-2.0],"v0.1 v0.2":[1.0,0.0]}"#);
        assert!(GrassmannElement::from_json(r#"{"v0.2 v0.1":[1.0,0.0]}"#).is_err());
    }

    fn arb_element(n: u8, max_terms: usize) -> impl Strategy<Value = GrassmannElement> {
        prop::collection::vec((0u64..(1 << n), -3.0f64..3.0, -3.0f64..3.0), 0..=max_terms).prop_map(move |terms| {
            GrassmannElement::from_terms(terms.into_iter().map(|(mask, re, im)| {
                let key = GeneratorId::variable(1).block();
                (MultiIndex::from_block(key, mask), Complex64::new(re, im))
            }))
        })
    }

    proptest! {
        #[test]
        fn json_roundtrip_is_lossless(a in arb_element(6, 16)) {
            prop_assert_eq!(GrassmannElement::from_json(&a.to_json()).unwrap(), a);
        }

        #[test]
        fn banach_property(a in arb_element(6, 16), b in arb_element(6, 16)) {
            prop_assert!((&a * &b).norm() <= a.norm() * b.norm() * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn associativity(a in arb_element(5, 8), b in arb_element(5, 8), c in arb_element(5, 8)) {
            let lhs = &(&a * &b) * &c;
            let rhs = &a * &(&b * &c);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + lhs.max_abs_coefficient()));
        }

        #[test]
        fn exp_inverse(a in arb_element(6, 10)) {
            let even = a.filter(|m| m.is_even() && !m.is_unit());
            let prod = &even.exp().unwrap() * &(-&even).exp().unwrap();
            prop_assert!(prod.sub_with_threshold(&GrassmannElement::one(), 0.0).norm() < 1e-10);
        }
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Family, GrassmannElement};
use crate::error::{Error, Result};

use super::partition::Partition;
use super::space::WienerSpace;

/// A `(0, k)`-dimensional random variable: `k` elements in the increment
/// generators of a partition.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomVariable {
    partition: Partition,
    components: Vec<GrassmannElement>,
}

impl RandomVariable {
    pub fn new(partition: Partition, components: Vec<GrassmannElement>) -> Result<Self> {
        let steps = partition.steps();
        for x in &components {
            if let Some(g) = x
                .generators()
                .find(|g| g.family == Family::Increment && (g.slice == 0 || g.slice as usize > steps))
            {
                return Err(Error::UndeclaredSlice { slice: g.slice, steps });
            }
        }
        Ok(Self { partition, components })
    }

    /// `β_t` on the given partition, `t` its horizon.
    pub fn brownian_at_horizon(w: &WienerSpace, partition: Partition) -> Self {
        let components = w.brownian_path(&partition).pop().expect("non-empty path");
        Self { partition, components }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn components(&self) -> &[GrassmannElement] {
        &self.components
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            partition: self.partition.clone(),
            components: self.components.iter().map(|x| x.scale(c)).collect(),
        }
    }

    /// `E[X^{i_1} ⋯ X^{i_k}]` for the listed component indices (0-based), in order.
    pub fn moment(&self, w: &WienerSpace, indices: &[usize]) -> Result<GrassmannElement> {
        let mut prod = GrassmannElement::one();
        for &i in indices {
            let x = self.components.get(i).ok_or(Error::DimensionMismatch {
                expected: self.dimension(),
                found: i + 1,
            })?;
            prod = &prod * x;
        }
        w.expectation(&self.partition, &prod)
    }
}

/// All increasing index subsets of `0..k`, including the empty one, ordered by size.
pub fn default_test_family(k: usize) -> Vec<Vec<usize>> {
    let mut family: Vec<Vec<usize>> = (0u64..1 << k)
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    family.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    family
}

/// `max_H |E[H(X)] - E[H(Y)]|` over a family of monomials in the components.
///
/// When parameters survive the expectation the difference is measured in norm.
pub fn mu_distance(
    w: &WienerSpace,
    x: &RandomVariable,
    y: &RandomVariable,
    family: Option<&[Vec<usize>]>,
) -> Result<f64> {
    if x.dimension() != y.dimension() {
        return Err(Error::DimensionMismatch {
            expected: x.dimension(),
            found: y.dimension(),
        });
    }
    let default;
    let family = match family {
        Some(f) => f,
        None => {
            default = default_test_family(x.dimension());
            &default
        }
    };
    let mut worst: f64 = 0.0;
    for h in family {
        let d = &x.moment(w, h)? - &y.moment(w, h)?;
        worst = worst.max(d.norm());
    }
    Ok(worst)
}

/// `E[α^i_s α^j_u]` for the bridge `α_s = β_s - s β_1`.
pub fn bridge_covariance(w: &WienerSpace, s: f64, u: f64) -> Result<DMatrix<Complex64>> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!(
            "bridge times must lie in [0, 1], got ({s}, {u})"
        )));
    }
    if s > u {
        return Err(Error::NonIncreasingTimes);
    }
    let mut times: Vec<f64> = [s, u, 1.0].into_iter().filter(|&t| t > 0.0).collect();
    times.dedup();
    let partition = Partition::through(&times)?;
    let path = w.brownian_path(&partition);
    let at = |t: f64| &path[partition.index_of(t).unwrap_or(0)];
    let beta_one = at(1.0);
    let alpha =
        |t: f64| -> Vec<GrassmannElement> { at(t).iter().zip(beta_one).map(|(b, b1)| b - &b1.scale(t)).collect() };
    let (a_s, a_u) = (alpha(s), alpha(u));
    let m = w.dimension();
    let mut cov = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            cov[(i, j)] = w.expectation_scalar(&partition, &(&a_s[i] * &a_u[j]))?;
        }
    }
    Ok(cov)
}

/// One row of a Brownian moment table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub time: f64,
    pub monomial: String,
    pub re: f64,
    pub im: f64,
}

/// `E[β^{a_1}_t ⋯ β^{a_k}_t]` for every nonempty increasing component subset
/// of degree at most `max_degree`, at each requested time.
pub fn moment_table(w: &WienerSpace, times: &[f64], max_degree: usize) -> Result<Vec<MomentRow>> {
    let partition = Partition::through(times)?;
    let path = w.brownian_path(&partition);
    let mut rows = Vec::new();
    for (r, &t) in times.iter().enumerate() {
        let x = RandomVariable {
            partition: partition.clone(),
            components: path[r + 1].clone(),
        };
        for h in default_test_family(w.dimension()) {
            if h.is_empty() || h.len() > max_degree {
                continue;
            }
            let value = x.moment(w, &h)?.scalar_part();
            let monomial = h.iter().map(|a| format!("β[{}]", a + 1)).collect::<String>();
            rows.push(MomentRow {
                time: t,
                monomial,
                re: value.re,
                im: value.im,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `time,monomial,re,im`.
pub fn write_moment_csv<W: std::io::Write>(rows: &[MomentRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Serialization(e.to_string()))
}

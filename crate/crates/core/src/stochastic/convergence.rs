use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// One line of a refinement table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "dt")]
    pub dt: f64,
    pub quantity: String,
    pub value_re: f64,
    pub value_im: f64,
    pub error_vs_extrapolate: f64,
}

/// A scalar tracked over a sequence of step counts, with its first-order
/// Richardson extrapolate from the two finest runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub quantity: String,
    pub horizon: f64,
    pub steps: Vec<usize>,
    pub values: Vec<Complex64>,
    pub extrapolate: Complex64,
}

impl ConvergenceStudy {
    /// Evaluate `f(N)` for each `N` (concurrently) on uniform grids over `[0, horizon]`.
    pub fn run<F>(quantity: impl Into<String>, horizon: f64, steps: &[usize], f: F) -> Result<Self>
    where
        F: Fn(usize) -> Result<Complex64> + Sync,
    {
        check_steps(steps)?;
        let values: Vec<Complex64> = steps.par_iter().map(|&n| f(n)).collect::<Result<_>>()?;
        Ok(Self::from_values(quantity, horizon, steps.to_vec(), values))
    }

    pub fn from_values(quantity: impl Into<String>, horizon: f64, steps: Vec<usize>, values: Vec<Complex64>) -> Self {
        let extrapolate = richardson(&steps, &values);
        Self {
            quantity: quantity.into(),
            horizon,
            steps,
            values,
            extrapolate,
        }
    }

    /// `|v(N) - v(2N)| / |v(2N) - v(4N)|` over consecutive triples; tends to 2 at first order.
    pub fn difference_ratios(&self) -> Vec<f64> {
        self.values
            .windows(3)
            .map(|w| (w[0] - w[1]).norm() / (w[1] - w[2]).norm())
            .collect()
    }

    /// `|v(N) - exact|` per run.
    pub fn errors(&self, exact: Complex64) -> Vec<f64> {
        self.values.iter().map(|v| (v - exact).norm()).collect()
    }

    pub fn rows(&self) -> Vec<ConvergenceRow> {
        self.steps
            .iter()
            .zip(&self.values)
            .map(|(&n, v)| ConvergenceRow {
                n,
                dt: self.horizon / n as f64,
                quantity: self.quantity.clone(),
                value_re: v.re,
                value_im: v.im,
                error_vs_extrapolate: (v - self.extrapolate).norm(),
            })
            .collect()
    }
}

/// Consecutive ratios `e_k / e_{k+1}`.
pub fn error_ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

/// First-order extrapolation in `1/N` from the last two values.
pub fn richardson(steps: &[usize], values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(f64::NAN, f64::NAN),
        1 => values[0],
        k => {
            let (n0, n1) = (steps[k - 2] as f64, steps[k - 1] as f64);
            (values[k - 1] * n1 - values[k - 2] * n0) / (n1 - n0)
        }
    }
}

pub(crate) fn check_steps(steps: &[usize]) -> Result<()> {
    if steps.is_empty() || steps[0] == 0 {
        return Err(Error::InvalidParameter("step counts must be positive".into()));
    }
    if steps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "step counts must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// CSV with header `N,dt,quantity,value_re,value_im,error_vs_extrapolate`.
pub fn write_convergence_csv<W: std::io::Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Serialization(e.to_string()))
}

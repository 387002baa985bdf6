use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

pub const DEFAULT_EXACT_TOL: f64 = 1e-10;
pub const FD_TOL: f64 = 1e-8;
pub const RATE_LOW: f64 = 1.7;
pub const RATE_HIGH: f64 = 2.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Algebra,
    Wiener,
    Ito,
    Sde,
    Fk,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianName {
    Flat,
    FlatPotential,
    Ou,
    Oscillator,
    Quartic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `E[ζ¹ζ²]` of the OU SDE started at 0, by Picard iteration.
    OuMoment,
    /// Scalar part of `E[ζ¹ζ²]` under the flat Hamiltonian.
    FlatMoment,
    /// Constant coefficient of the oscillator kernel.
    OscillatorConstant,
    /// Scalar part of `E[ζ¹ζ²]` under the quartic Hamiltonian.
    QuarticMoment,
    /// Itô-formula residual for `F = X¹X²` on the OU solution started at `ξ`.
    ItoResidual,
    /// Integration-by-parts residual on the same process.
    IbpResidual,
}

impl Quantity {
    /// Expected convergence order in the step size.
    pub fn order(self) -> i32 {
        match self {
            Quantity::OscillatorConstant => 2,
            _ => 1,
        }
    }
}

/// Every run parameter, as read from `--config`. Missing fields fall back to defaults.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Option<Suite>,
    pub hamiltonian: Option<HamiltonianName>,
    pub quantity: Option<Quantity>,
    pub t: Option<f64>,
    pub n: Option<Vec<usize>>,
    pub r: Option<f64>,
    pub c: Option<f64>,
    pub b: Option<f64>,
    pub lambda: Option<f64>,
    pub m: Option<usize>,
    pub times: Option<Vec<f64>>,
    pub degree: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.t {
            if !(t > 0.0 && t.is_finite()) {
                bail!("t must be positive and finite, got {t}");
            }
        }
        if let Some(n) = &self.n {
            if n.is_empty() || n[0] == 0 || n.windows(2).any(|w| w[0] >= w[1]) {
                bail!("N list must be nonempty, positive and strictly increasing, got {n:?}");
            }
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                bail!("tolerance must be positive, got {tol}");
            }
        }
        Ok(())
    }

    pub fn tol_or_default(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_EXACT_TOL)
    }

    pub fn horizon(&self) -> f64 {
        self.t.unwrap_or(1.0)
    }

    pub fn steps(&self, default: &[usize]) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| default.to_vec())
    }
}

use anticommute::algebra::GrassmannElement;
use anticommute::wiener::{moment_table, write_moment_csv, WienerSpace};
use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig, RATE_HIGH, RATE_LOW};

/// A rendered command result: JSON document, CSV table and overall status.
pub struct Report {
    pub json: Value,
    pub csv: String,
    pub passed: bool,
    pub default_format: Format,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.json)? + "\n",
            Format::Csv => self.csv.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(suite: &'static str, check: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            suite,
            check: check.into(),
            value,
            bound: format!("<= {tol:e}"),
            pass: value <= tol,
        }
    }

    pub fn exceeds(suite: &'static str, check: impl Into<String>, value: f64, floor: f64) -> Self {
        Self {
            suite,
            check: check.into(),
            value,
            bound: format!("> {floor:e}"),
            pass: value > floor,
        }
    }

    pub fn rate(suite: &'static str, check: impl Into<String>, ratio: f64) -> Self {
        Self {
            suite,
            check: check.into(),
            value: ratio,
            bound: format!("in [{RATE_LOW}, {RATE_HIGH}]"),
            pass: (RATE_LOW..=RATE_HIGH).contains(&ratio),
        }
    }
}

/// One rate check per doubling, labelled `N'/N`.
pub fn rate_checks(suite: &'static str, name: &str, steps: &[usize], ratios: &[f64]) -> Vec<Check> {
    ratios
        .iter()
        .enumerate()
        .map(|(k, &q)| Check::rate(suite, format!("{name} ratio N={}/N={}", steps[k], steps[k + 1]), q))
        .collect()
}

pub fn checks_csv(checks: &[Check]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in checks {
        w.serialize(c)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct Coefficient {
    pub monomial: String,
    pub re: f64,
    pub im: f64,
}

pub fn coefficients(x: &GrassmannElement) -> Vec<Coefficient> {
    x.sorted_terms()
        .into_iter()
        .map(|(m, c)| Coefficient {
            monomial: m.to_string(),
            re: c.re,
            im: c.im,
        })
        .collect()
}

pub fn moments(cfg: &RunConfig) -> Result<Report> {
    let w = WienerSpace::new(cfg.m.unwrap_or(2))?;
    let times = cfg.times.clone().unwrap_or_else(|| vec![0.5, 1.0]);
    let rows = moment_table(&w, &times, cfg.degree.unwrap_or(2))?;
    let mut buf = Vec::new();
    write_moment_csv(&rows, &mut buf)?;
    Ok(Report {
        json: serde_json::json!({ "m": w.dimension(), "times": times, "moments": rows }),
        csv: String::from_utf8(buf)?,
        passed: true,
        default_format: Format::Csv,
    })
}

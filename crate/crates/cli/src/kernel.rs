use anticommute::berezin::IntegralKernel;
use anticommute::feynman_kac::{
    closed_form_kernel, compare_kernels, fk_operator, hamiltonian_matrix, kernel_extract, semigroup_oracle, ClosedForm,
    HamiltonianSpec,
};
use anticommute::stochastic::error_ratios;
use anticommute::wiener::Partition;
use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, HamiltonianName, RunConfig};
use crate::report::{coefficients, rate_checks, Check, Coefficient, Report};

pub fn model(name: HamiltonianName, cfg: &RunConfig) -> Result<(HamiltonianSpec, ClosedForm)> {
    let (r, c, b, lambda) = (
        cfg.r.unwrap_or(1.0),
        cfg.c.unwrap_or(1.0),
        cfg.b.unwrap_or(1.0),
        cfg.lambda.unwrap_or(1.0),
    );
    Ok(match name {
        HamiltonianName::Flat => (HamiltonianSpec::flat(), ClosedForm::Flat),
        HamiltonianName::FlatPotential => (
            HamiltonianSpec::flat_with_potential(lambda),
            ClosedForm::FlatPotential { lambda },
        ),
        HamiltonianName::Ou => (
            HamiltonianSpec::ornstein_uhlenbeck(r, c),
            ClosedForm::OrnsteinUhlenbeck { r, c },
        ),
        HamiltonianName::Oscillator => (HamiltonianSpec::harmonic_oscillator(), ClosedForm::Oscillator),
        HamiltonianName::Quartic => (HamiltonianSpec::quartic(b, c)?, ClosedForm::Quartic { b, c }),
    })
}

#[derive(Serialize)]
struct Run {
    #[serde(rename = "N")]
    n: usize,
    kernel_coefficients: Vec<Coefficient>,
    max_abs_error: f64,
    max_abs_error_vs_closed_form: f64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    source: &'a str,
    #[serde(rename = "N")]
    n: Option<usize>,
    monomial: &'a str,
    re: f64,
    im: f64,
    max_abs_error_vs_oracle: f64,
}

pub fn run(name: HamiltonianName, cfg: &RunConfig) -> Result<Report> {
    let (h, form) = model(name, cfg)?;
    let t = cfg.horizon();
    let steps = cfg.steps(&[64]);
    let tol = cfg.tol_or_default();
    let oracle = kernel_extract(&semigroup_oracle(&hamiltonian_matrix(&h), t)?)?;
    let closed = closed_form_kernel(form, t)?;
    let estimates: Vec<IntegralKernel> = steps
        .par_iter()
        .map(|&n| kernel_extract(&fk_operator(&h, &Partition::uniform(t, n)?)?))
        .collect::<anticommute::Result<_>>()?;
    let runs: Vec<Run> = steps
        .iter()
        .zip(&estimates)
        .map(|(&n, k)| Run {
            n,
            kernel_coefficients: coefficients(k.body()),
            max_abs_error: compare_kernels(&oracle, k).max_abs_diff,
            max_abs_error_vs_closed_form: compare_kernels(&closed, k).max_abs_diff,
        })
        .collect();

    let closed_vs_oracle = compare_kernels(&oracle, &closed);
    let mut checks = vec![Check::at_most(
        "kernel",
        "closed form vs oracle",
        closed_vs_oracle.max_abs_diff,
        tol,
    )];
    let errors: Vec<f64> = runs.iter().map(|r| r.max_abs_error).collect();
    if errors.iter().all(|&e| e <= tol) {
        checks.push(Check::at_most(
            "kernel",
            "FK vs oracle (exact case)",
            errors.iter().copied().fold(0.0, f64::max),
            tol,
        ));
    } else if steps.len() > 1 {
        checks.extend(rate_checks("kernel", "FK vs oracle", &steps, &error_ratios(&errors)));
    }
    let passed = checks.iter().all(|c| c.pass);

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut emit = |source: &str, n: Option<usize>, k: &IntegralKernel, error: f64| -> Result<()> {
        for c in coefficients(k.body()) {
            w.serialize(CsvRow {
                source,
                n,
                monomial: &c.monomial,
                re: c.re,
                im: c.im,
                max_abs_error_vs_oracle: error,
            })?;
        }
        Ok(())
    };
    emit("oracle", None, &oracle, 0.0)?;
    emit("closed_form", None, &closed, closed_vs_oracle.max_abs_diff)?;
    for ((&n, k), e) in steps.iter().zip(&estimates).zip(&errors) {
        emit("fk", Some(n), k, *e)?;
    }
    let csv = String::from_utf8(w.into_inner()?)?;

    let json = serde_json::json!({
        "hamiltonian": h.name(),
        "closed_form": form,
        "t": t,
        "N": steps,
        "oracle_coefficients": coefficients(oracle.body()),
        "closed_form_coefficients": coefficients(closed.body()),
        "max_abs_error_closed_form_vs_oracle": closed_vs_oracle,
        "runs": runs,
        "error_ratios": error_ratios(&errors),
        "checks": checks,
        "passed": passed,
    });
    Ok(Report {
        json,
        csv,
        passed,
        default_format: Format::Json,
    })
}

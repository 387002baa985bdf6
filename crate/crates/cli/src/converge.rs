use anticommute::algebra::{variables, GrassmannElement};
use anticommute::berezin::SupersmoothFunction;
use anticommute::feynman_kac::{fk_evolve, fk_operator, kernel_extract, HamiltonianSpec};
use anticommute::stochastic::{
    error_ratios, ibp_residual, ito_formula_residual, picard_solve, ConvergenceStudy, IbpCorrection, ItoProcess,
    MixedFunction, SdeSpec,
};
use anticommute::wiener::{Partition, WienerSpace};
use anyhow::Result;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Format, Quantity, RunConfig};
use crate::report::{rate_checks, Check, Report};

const DEFAULT_STEPS: [usize; 4] = [8, 16, 32, 64];

fn eta() -> Vec<GrassmannElement> {
    variables(2).into_iter().map(GrassmannElement::generator).collect()
}

fn pair_function(h: &HamiltonianSpec) -> anticommute::Result<SupersmoothFunction> {
    let x = eta();
    SupersmoothFunction::new(&x[0] * &x[1], h.variables())
}

type Evaluator = Box<dyn Fn(usize) -> anticommute::Result<Complex64> + Sync>;

/// Value at `N` steps and the exact limit where one is known in closed form.
fn evaluator(quantity: Quantity, cfg: &RunConfig) -> Result<(Evaluator, Option<f64>)> {
    let t = cfg.horizon();
    let (r, c, b) = (cfg.r.unwrap_or(1.0), cfg.c.unwrap_or(1.0), cfg.b.unwrap_or(1.0));
    let real = |x: f64| Complex64::new(x, 0.0);
    Ok(match quantity {
        Quantity::OuMoment => {
            let exact = c * c * (1.0 - (-2.0 * r * t).exp()) / (2.0 * r);
            let f = move |n: usize| {
                let w = WienerSpace::new(2)?;
                let p = Partition::uniform(t, n)?;
                let sde = SdeSpec::ornstein_uhlenbeck(&w, r, &[c, 0.0, 0.0, c], vec![GrassmannElement::zero(); 2])?;
                let z = picard_solve(&w, &sde, &p, n + 2)?.process;
                w.expectation_scalar(&p, &(&z.terminal()[0] * &z.terminal()[1]))
            };
            (Box::new(f), Some(exact))
        }
        Quantity::FlatMoment | Quantity::QuarticMoment => {
            let h = if quantity == Quantity::FlatMoment {
                HamiltonianSpec::flat()
            } else {
                HamiltonianSpec::quartic(b, c)?
            };
            let exact = if quantity == Quantity::FlatMoment {
                h.wiener().e(0, 1) * t
            } else {
                c * c / (2.0 * b) * ((-2.0 * b * t).exp() - 1.0)
            };
            let f = move |n: usize| {
                let v = fk_evolve(&h, &pair_function(&h)?, &Partition::uniform(t, n)?)?;
                Ok(v.body().scalar_part())
            };
            (Box::new(f), Some(exact))
        }
        Quantity::OscillatorConstant => {
            let h = HamiltonianSpec::harmonic_oscillator();
            let f = move |n: usize| {
                let k = kernel_extract(&fk_operator(&h, &Partition::uniform(t, n)?)?)?;
                Ok(k.body().scalar_part())
            };
            (Box::new(f), Some(t.sinh()))
        }
        Quantity::ItoResidual | Quantity::IbpResidual => {
            let f = move |n: usize| {
                let w = WienerSpace::new(2)?;
                let p = Partition::uniform(t, n)?;
                let sde = SdeSpec::ornstein_uhlenbeck(&w, r, &[c, 0.0, 0.0, c], eta())?;
                let x = ItoProcess::from_sde(&w, &sde, &picard_solve(&w, &sde, &p, n + 2)?.process)?;
                let value = if quantity == Quantity::ItoResidual {
                    let x2 = eta();
                    ito_formula_residual(&w, &MixedFunction::odd(variables(2), &x2[0] * &x2[1]), &x)?
                } else {
                    ibp_residual(&w, &x, IbpCorrection::FromItoFormula)?
                };
                Ok(real(value))
            };
            (Box::new(f), Some(0.0))
        }
    })
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "N")]
    n: String,
    dt: Option<f64>,
    quantity: String,
    value_re: f64,
    value_im: f64,
    error_vs_extrapolate: Option<f64>,
    error_vs_exact: Option<f64>,
}

pub fn run(quantity: Quantity, cfg: &RunConfig) -> Result<Report> {
    let name = serde_json::to_value(quantity)?.as_str().unwrap_or_default().to_string();
    let steps = cfg.steps(&DEFAULT_STEPS);
    let (f, exact) = evaluator(quantity, cfg)?;
    let study = ConvergenceStudy::run(name.clone(), cfg.horizon(), &steps, f)?;
    let tol = cfg.tol_or_default();

    let errors = exact.map(|e| study.errors(Complex64::new(e, 0.0)));
    let mut checks = Vec::new();
    if let Some(errors) = &errors {
        if errors.iter().all(|&e| e <= tol) {
            checks.push(Check::at_most(
                "converge",
                format!("{name} exact at every N"),
                errors.iter().copied().fold(0.0, f64::max),
                tol,
            ));
        } else if steps.len() > 1 {
            let order = quantity.order();
            let normalized: Vec<f64> = error_ratios(errors)
                .iter()
                .map(|q| q.powf(1.0 / order as f64))
                .collect();
            let label = if order == 1 {
                name.clone()
            } else {
                format!("{name} (order {order}, ratio^(1/{order}))")
            };
            checks.extend(rate_checks("converge", &label, &steps, &normalized));
        }
    }
    let passed = checks.iter().all(|c| c.pass);

    let mut w = csv::Writer::from_writer(Vec::new());
    for (k, row) in study.rows().into_iter().enumerate() {
        w.serialize(CsvRow {
            n: row.n.to_string(),
            dt: Some(row.dt),
            quantity: row.quantity,
            value_re: row.value_re,
            value_im: row.value_im,
            error_vs_extrapolate: Some(row.error_vs_extrapolate),
            error_vs_exact: errors.as_ref().map(|e| e[k]),
        })?;
    }
    w.serialize(CsvRow {
        n: "richardson".into(),
        dt: None,
        quantity: name.clone(),
        value_re: study.extrapolate.re,
        value_im: study.extrapolate.im,
        error_vs_extrapolate: None,
        error_vs_exact: exact.map(|e| (study.extrapolate - e).norm()),
    })?;
    let csv = String::from_utf8(w.into_inner()?)?;

    let json = serde_json::json!({
        "quantity": name,
        "t": cfg.horizon(),
        "rows": study.rows(),
        "extrapolate": { "re": study.extrapolate.re, "im": study.extrapolate.im },
        "exact": exact,
        "expected_order": quantity.order(),
        "errors_vs_exact": errors,
        "error_ratios": errors.as_ref().map(|e| error_ratios(e)),
        "checks": checks,
        "passed": passed,
    });
    Ok(Report {
        json,
        csv,
        passed,
        default_format: Format::Csv,
    })
}

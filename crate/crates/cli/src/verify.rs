use anticommute::algebra::{auxiliaries, supercommutator, variables, GeneratorId, GrassmannElement, MultiIndex};
use anticommute::berezin::{berezin_integral, left_derivative, IntegralKernel, SupersmoothFunction};
use anticommute::feynman_kac::{
    closed_form_kernel, compare_kernels, fk_bruteforce, fk_evolve, fk_operator, hamiltonian_matrix, kernel_extract,
    monomial_basis, semigroup_oracle, ClosedForm, HamiltonianSpec,
};
use anticommute::stochastic::{
    error_ratios, ibp_residual, isometry_residual, ito_formula_residual, picard_solve, picard_solve_seeded, richardson,
    AdaptedProcess, IbpCorrection, ItoProcess, MixedFunction, SdeSpec,
};
use anticommute::wiener::{bridge_covariance, mu_distance, Partition, WienerSpace};
use anyhow::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Format, Suite, FD_TOL};
use crate::report::{checks_csv, rate_checks, Check, Report};

const SEED: u64 = 20;
const REFINEMENT: [usize; 4] = [8, 16, 32, 64];
/// Distance of the two-finest-run extrapolate from the exact OU moment.
const EXTRAPOLATE_TOL: f64 = 2e-3;
/// Absolute error of the scalar oscillator coefficient at the finest grid.
const SCALAR_FK_TOL: f64 = 5e-3;

pub fn run(suite: Suite, tol: f64) -> Result<Report> {
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Algebra, Suite::Wiener, Suite::Ito, Suite::Sde, Suite::Fk],
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(match s {
            Suite::Algebra => algebra(tol)?,
            Suite::Wiener => wiener(tol)?,
            Suite::Ito => ito(tol)?,
            Suite::Sde => sde(tol)?,
            Suite::Fk => fk(tol)?,
            Suite::All => unreachable!(),
        });
    }
    let passed = checks.iter().all(|c| c.pass);
    let json = serde_json::json!({
        "suite": suite,
        "tolerance": tol,
        "checks": checks,
        "failed": checks.iter().filter(|c| !c.pass).count(),
        "passed": passed,
    });
    Ok(Report {
        csv: checks_csv(&checks)?,
        json,
        passed,
        default_format: Format::Json,
    })
}

fn eta(n: usize) -> Vec<GrassmannElement> {
    variables(n).into_iter().map(GrassmannElement::generator).collect()
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_element(rng: &mut ChaCha8Rng, gens: &[GeneratorId], max_terms: usize, odd: Option<bool>) -> GrassmannElement {
    let count = rng.random_range(1..=max_terms);
    let mut terms = Vec::with_capacity(count);
    while terms.len() < count {
        let subset: Vec<GeneratorId> = gens.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if odd.is_some_and(|o| (subset.len() % 2 == 1) != o) {
            continue;
        }
        terms.push((
            MultiIndex::from_product(&subset).expect("distinct").0,
            random_complex(rng),
        ));
    }
    GrassmannElement::from_terms(terms)
}

fn algebra(tol: f64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut sc, mut assoc, mut nil, mut banach, mut exp_inv, mut anti): (f64, f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..300 {
        let gens = variables(rng.random_range(1..=6));
        let (pa, pb) = (rng.random_bool(0.5), rng.random_bool(0.5));
        let a = random_element(&mut rng, &gens, 12, Some(pa));
        let b = random_element(&mut rng, &gens, 12, Some(pb));
        let c = random_element(&mut rng, &gens, 12, None);
        sc = sc.max(supercommutator(&a, &b).expect("homogeneous").max_abs_coefficient());
        let left = &(&a * &b) * &c;
        assoc = assoc.max(left.max_abs_diff(&(&a * &(&b * &c))) / left.max_abs_coefficient().max(1.0));
        let odd = random_element(&mut rng, &gens, 12, Some(true));
        nil = nil.max((&odd * &odd).max_abs_coefficient());
        banach = banach.max((&a * &b).norm() / (a.norm() * b.norm()).max(f64::MIN_POSITIVE));
        let even = random_element(&mut rng, &gens, 6, Some(false)).scale(0.5);
        exp_inv = exp_inv.max((&even.exp()? * &(-&even).exp()?).max_abs_diff(&GrassmannElement::one()));
        let (i, j) = (gens[0], *gens.last().unwrap());
        let dij = left_derivative(&left_derivative(&c, j), i);
        let dji = left_derivative(&left_derivative(&c, i), j);
        anti = anti.max(if i == j {
            dij.max_abs_coefficient()
        } else {
            (&dij + &dji).max_abs_coefficient()
        });
    }
    let mut taylor: f64 = 0.0;
    let shifts: Vec<GeneratorId> = (1..=4).map(|c| GeneratorId::auxiliary(1, c)).collect();
    let bases: Vec<GeneratorId> = (1..=4).map(|c| GeneratorId::auxiliary(2, c)).collect();
    for _ in 0..30 {
        let f = SupersmoothFunction::new(random_element(&mut rng, &variables(4), 16, None), variables(4))?;
        let xi: Vec<_> = (0..4)
            .map(|_| random_element(&mut rng, &bases, 3, Some(true)))
            .collect();
        let h: Vec<_> = (0..4)
            .map(|_| random_element(&mut rng, &shifts, 3, Some(true)))
            .collect();
        taylor = taylor.max(f.taylor_residual(&xi, &h)?);
    }
    let s = "algebra";
    Ok(vec![
        Check::at_most(s, "graded commutativity", sc, tol),
        Check::at_most(s, "associativity (relative)", assoc, tol),
        Check::at_most(s, "odd elements square to zero", nil, tol),
        Check::at_most(s, "norm(ab) / (norm(a) norm(b))", banach, 1.0 + tol),
        Check::at_most(s, "exp(a) exp(-a) = 1 for even a", exp_inv, tol),
        Check::at_most(s, "derivatives anticommute", anti, tol),
        Check::at_most(s, "Taylor expansion residual", taylor, tol),
    ])
}

fn wiener(tol: f64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut norm, mut pde): (f64, f64) = (0.0, 0.0);
    let h = 1e-5;
    for m in [2, 4] {
        let w = WienerSpace::new(m)?;
        let vars = variables(m);
        for t in [0.3, 1.0, 2.5] {
            let p = w.heat_kernel(&vars, t)?;
            norm = norm.max(berezin_integral(p.body(), &vars)?.max_abs_diff(&GrassmannElement::one()));
            let dt = (w.heat_kernel(&vars, t + h)?.body() - w.heat_kernel(&vars, t - h)?.body()).scale(0.5 / h);
            pde = pde.max((&dt + w.free_hamiltonian(&p)?.body()).norm());
        }
    }

    let w = WienerSpace::new(2)?;
    let xi = variables(2);
    let phi: Vec<GeneratorId> = (1..=2).map(|c| GeneratorId::auxiliary(1, c)).collect();
    let inputs = auxiliaries(2);
    let kernel = |out: &[GeneratorId], inp: &[GeneratorId], t: f64| -> anticommute::Result<IntegralKernel> {
        let z: Vec<_> = out
            .iter()
            .zip(inp)
            .map(|(&a, &b)| &GrassmannElement::generator(a) - &GrassmannElement::generator(b))
            .collect();
        IntegralKernel::new(w.heat_kernel_at(&z, t)?, out.to_vec(), inp.to_vec())
    };
    let semigroup = kernel(&xi, &phi, 0.3)?
        .compose(&kernel(&phi, &inputs, 0.7)?)?
        .max_abs_diff(&kernel(&xi, &inputs, 1.0)?);

    let w4 = WienerSpace::new(4)?;
    let times = [0.2, 0.5, 0.9];
    let part = Partition::through(&times)?;
    let path = w4.brownian_path(&part);
    let mut cov: f64 = 0.0;
    let mut engines: f64 = 0.0;
    for r in 1..=3 {
        for s in 1..=3 {
            for a in 0..4 {
                for b in 0..4 {
                    let x = &path[r][a] * &path[s][b];
                    let v = w4.expectation_scalar(&part, &x)?;
                    cov = cov.max((v - w4.e(a, b) * times[r - 1].min(times[s - 1])).norm());
                    engines = engines.max(
                        w4.expectation(&part, &x)?
                            .max_abs_diff(&w4.expectation_joint(&part, &x)?),
                    );
                }
            }
        }
    }
    let independent = w4
        .expectation(&part, &(&(&path[3][0] - &path[2][0]) * &(&path[2][1] - &path[1][1])))?
        .norm();

    let mut bridge: f64 = 0.0;
    let mut kolmogorov: f64 = 0.0;
    for _ in 0..10 {
        let (x, y): (f64, f64) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let (s, u) = (x.min(y), x.max(y));
        let b = bridge_covariance(&w, s, u)?;
        for i in 0..2 {
            for j in 0..2 {
                bridge = bridge.max((b[(i, j)] - w.e(i, j) * s * (1.0 - u)).norm());
            }
        }
        let mut ts: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..2.0)).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let slots: Vec<Vec<GeneratorId>> = (0..ts.len())
            .map(|r| (1..=2).map(|c| GeneratorId::auxiliary(10 + r as u32, c)).collect())
            .collect();
        let density = w.finite_dimensional_density(&Partition::through(&ts)?, &slots)?;
        let marginal = berezin_integral(&density, slots.last().unwrap())?;
        if ts.len() > 1 {
            let k = ts.len() - 1;
            let expected = w.finite_dimensional_density(&Partition::through(&ts[..k])?, &slots[..k])?;
            kolmogorov = kolmogorov.max(marginal.max_abs_diff(&expected));
        } else {
            kolmogorov = kolmogorov.max(marginal.max_abs_diff(&GrassmannElement::one()));
        }
    }
    let s = "wiener";
    Ok(vec![
        Check::at_most(s, "heat kernel normalization", norm, tol),
        Check::at_most(s, "semigroup p(0.3) * p(0.7) = p(1.0)", semigroup, tol),
        Check::at_most(s, "heat equation residual (central difference)", pde, FD_TOL),
        Check::at_most(s, "Brownian covariance", cov, tol),
        Check::at_most(s, "independent increments", independent, tol),
        Check::at_most(s, "single-pass vs joint-density expectation", engines, tol),
        Check::at_most(s, "bridge covariance", bridge, tol),
        Check::at_most(s, "Kolmogorov consistency", kolmogorov, tol),
    ])
}

fn ito(tol: f64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let w = WienerSpace::new(2)?;
    let xi = eta(2);
    let (mut iso, mut mean): (f64, f64) = (0.0, 0.0);
    for trial in 0..40 {
        let p = Partition::uniform(rng.random_range(0.3..2.0), rng.random_range(1..=5))?;
        let path = w.brownian_path(&p);
        let coeffs: Vec<(Complex64, Complex64)> = (0..4)
            .map(|_| (random_complex(&mut rng), random_complex(&mut rng)))
            .collect();
        let nodes = path
            .iter()
            .map(|b| {
                coeffs
                    .iter()
                    .map(|&(c0, c1)| match trial % 3 {
                        0 => &GrassmannElement::scalar(c0) + &(&xi[0] * &xi[1]).scale(c1),
                        1 => &GrassmannElement::scalar(c0) + &(&b[0] * &b[1]).scale(c1),
                        _ => &b[0].scale(c0) + &(&b[1] + &xi[1]).scale(c1),
                    })
                    .collect()
            })
            .collect();
        let c = AdaptedProcess::new(p.clone(), nodes)?;
        for i in 0..2 {
            for j in 0..2 {
                iso = iso.max(isometry_residual(&w, &c, i, j)?);
            }
        }
        for node in c.ito_integral(&w)?.nodes() {
            for z in node {
                mean = mean.max(w.expectation(&p, z)?.norm());
            }
        }
    }
    Ok(vec![
        Check::at_most("ito", "isometry residual (40 integrands)", iso, tol),
        Check::at_most("ito", "Itô integrals have zero mean", mean, tol),
    ])
}

fn sde(tol: f64) -> Result<Vec<Check>> {
    let w = WienerSpace::new(2)?;
    let xi = eta(2);
    let id = [1.0, 0.0, 0.0, 1.0];
    let exact = (1.0 - (-2.0f64).exp()) / 2.0;
    let runs: Vec<(f64, bool, f64, f64, f64)> = REFINEMENT
        .par_iter()
        .map(|&n| -> anticommute::Result<_> {
            let p = Partition::uniform(1.0, n)?;
            let zero_start = SdeSpec::ornstein_uhlenbeck(&w, 1.0, &id, vec![GrassmannElement::zero(); 2])?;
            let sol = picard_solve(&w, &zero_start, &p, n + 2)?;
            let z = sol.process.terminal();
            let moment = w.expectation_scalar(&p, &(&z[0] * &z[1]))?.re;
            let stationary = sol.stationary_depth.is_some();

            let sde = SdeSpec::ornstein_uhlenbeck(&w, 1.0, &id, xi.clone())?;
            let sol = picard_solve(&w, &sde, &p, n + 2)?;
            let other: Vec<Vec<GrassmannElement>> = w
                .brownian_path(&p)
                .iter()
                .map(|b| b.iter().zip(&xi).map(|(x, y)| &x.scale(2.0) - y).collect())
                .collect();
            let seeded = picard_solve_seeded(&w, &sde, &AdaptedProcess::new(p.clone(), other)?, n + 2)?;
            let unique = mu_distance(
                &w,
                &sol.process.terminal_variable(),
                &seeded.process.terminal_variable(),
                None,
            )?;
            let x = ItoProcess::from_sde(&w, &sde, &sol.process)?;
            let ito = ito_formula_residual(&w, &MixedFunction::odd(variables(2), &xi[0] * &xi[1]), &x)?;
            let ibp = ibp_residual(&w, &x, IbpCorrection::FromItoFormula)?;
            Ok((moment, stationary, unique, ito, ibp))
        })
        .collect::<anticommute::Result<_>>()?;
    let errors: Vec<f64> = runs.iter().map(|r| (r.0 - exact).abs()).collect();
    let values: Vec<Complex64> = runs.iter().map(|r| Complex64::new(r.0, 0.0)).collect();
    let extrapolate = richardson(&REFINEMENT, &values).re;
    let s = "sde";
    let mut checks = rate_checks(s, "OU E[z1 z2] error", &REFINEMENT, &error_ratios(&errors));
    checks.push(Check::at_most(
        s,
        "OU E[z1 z2] Richardson extrapolate error",
        (extrapolate - exact).abs(),
        EXTRAPOLATE_TOL,
    ));
    checks.push(Check::at_most(
        s,
        "Picard iterations not stationary (count)",
        runs.iter().filter(|r| !r.1).count() as f64,
        0.0,
    ));
    checks.push(Check::at_most(
        s,
        "solution independent of Picard seed",
        runs.iter().map(|r| r.2).fold(0.0, f64::max),
        tol,
    ));
    let ito: Vec<f64> = runs.iter().map(|r| r.3).collect();
    let ibp: Vec<f64> = runs.iter().map(|r| r.4).collect();
    checks.extend(rate_checks(s, "Itô formula residual", &REFINEMENT, &error_ratios(&ito)));
    checks.extend(rate_checks(
        s,
        "integration by parts residual",
        &REFINEMENT,
        &error_ratios(&ibp),
    ));
    Ok(checks)
}

fn basis(h: &HamiltonianSpec) -> Result<Vec<SupersmoothFunction>> {
    Ok(monomial_basis(&h.variables())
        .into_iter()
        .map(|m| SupersmoothFunction::new(GrassmannElement::monomial(m, 1.0), h.variables()))
        .collect::<anticommute::Result<_>>()?)
}

fn fk(tol: f64) -> Result<Vec<Check>> {
    let s = "fk";
    let mut checks = Vec::new();
    let flat = HamiltonianSpec::flat();
    let heat = closed_form_kernel(ClosedForm::Flat, 1.0)?;
    let mut flat_err: f64 = 0.0;
    for f in basis(&flat)? {
        let fk = fk_evolve(&flat, &f, &Partition::uniform(1.0, 1)?)?;
        flat_err = flat_err.max(fk.body().max_abs_diff(heat.apply(&f.rename(auxiliaries(2))?)?.body()));
    }
    checks.push(Check::at_most(s, "flat N=1 vs heat kernel", flat_err, tol));

    let quartic = HamiltonianSpec::quartic(1.0, 1.0)?;
    let cases = [
        (
            HamiltonianSpec::ornstein_uhlenbeck(1.0, 1.0),
            ClosedForm::OrnsteinUhlenbeck { r: 1.0, c: 1.0 },
        ),
        (HamiltonianSpec::harmonic_oscillator(), ClosedForm::Oscillator),
        (
            HamiltonianSpec::flat_with_potential(0.5),
            ClosedForm::FlatPotential { lambda: 0.5 },
        ),
    ];
    for (h, form) in &cases {
        for t in [0.5, 1.0] {
            let oracle = kernel_extract(&semigroup_oracle(&hamiltonian_matrix(h), t)?)?;
            let d = compare_kernels(&oracle, &closed_form_kernel(*form, t)?).max_abs_diff;
            checks.push(Check::at_most(
                s,
                format!("{} closed-form kernel vs oracle at t={t}", form.name()),
                d,
                tol,
            ));
        }
    }
    let oracle = kernel_extract(&semigroup_oracle(&hamiltonian_matrix(&quartic), 1.0)?)?;
    let d = compare_kernels(
        &oracle,
        &closed_form_kernel(ClosedForm::Quartic { b: 1.0, c: 1.0 }, 1.0)?,
    );
    checks.push(Check::exceeds(
        s,
        format!(
            "quartic closed-form kernel differs from oracle at {}",
            d.worst_monomial.as_deref().unwrap_or("-")
        ),
        d.max_abs_diff,
        tol,
    ));

    let osc = &cases[1].0;
    let osc_oracle = semigroup_oracle(&hamiltonian_matrix(osc), 1.0)?;
    let errors: Vec<f64> = REFINEMENT
        .par_iter()
        .map(|&n| Ok(fk_operator(osc, &Partition::uniform(1.0, n)?)?.max_abs_diff(&osc_oracle)))
        .collect::<anticommute::Result<_>>()?;
    checks.extend(rate_checks(
        s,
        "oscillator FK operator error",
        &REFINEMENT,
        &error_ratios(&errors),
    ));
    let pair = SupersmoothFunction::new(&eta(2)[0] * &eta(2)[1], variables(2))?;
    let scalar = fk_evolve(osc, &pair, &Partition::uniform(1.0, 64)?)?
        .body()
        .scalar_part();
    checks.push(Check::at_most(
        s,
        "oscillator (e^-H η1η2)(0) vs sinh(1) at N=64",
        (scalar - 1f64.sinh()).norm(),
        SCALAR_FK_TOL,
    ));

    let target =
        &(&eta(2)[0] * &eta(2)[1]).scale((-2.0f64).exp()) + &GrassmannElement::scalar(((-2.0f64).exp() - 1.0) / 2.0);
    let q_errors: Vec<f64> = REFINEMENT
        .par_iter()
        .map(|&n| {
            Ok(fk_evolve(&quartic, &pair, &Partition::uniform(1.0, n)?)?
                .body()
                .max_abs_diff(&target))
        })
        .collect::<anticommute::Result<_>>()?;
    checks.extend(rate_checks(
        s,
        "quartic E[z1 z2] error",
        &REFINEMENT,
        &error_ratios(&q_errors),
    ));

    let mut engines: f64 = 0.0;
    for h in [&flat, &cases[0].0, osc, &cases[2].0, &quartic] {
        for n in [1, 2, 4] {
            let p = Partition::uniform(1.0, n)?;
            for f in basis(h)? {
                engines = engines.max(
                    fk_evolve(h, &f, &p)?
                        .body()
                        .max_abs_diff(fk_bruteforce(h, &f, &p)?.body()),
                );
            }
        }
    }
    checks.push(Check::at_most(
        s,
        "transfer operator vs joint density (N=1,2,4)",
        engines,
        tol,
    ));
    Ok(checks)
}

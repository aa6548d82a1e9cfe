//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any criterion fails.

// Negated comparisons below are deliberate: a NaN must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use prophet_prices::lp::scaffold::random_feasible_certificate;
use prophet_prices::lp::{
    check_dual_feasible, dual_objective, prices_from_primal, solve_dual, solve_primal, verify_feasible_point,
};
use prophet_prices::mechanism::{expected_welfare, lemma1_bound, WelfareMode};
use prophet_prices::offline::{fgl_prices, opt_stats, optimal_allocation};
use prophet_prices::theory::{mph_identity_residual, parameters_for, worst_claim1, ValuationClass};
use prophet_prices::{DualCertificate, Instance, OptStats, Parameters, PriceVector};

use common::{mph_corpus, partial_optimum, random_instance, rng, tightness, xos_corpus};

/// An instance with the parameter sets it must be checked under.
struct Case {
    inst: Instance,
    stats: OptStats,
    params: Vec<Parameters>,
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    match failures.first() {
        None => Outcome { ok: true, detail: summary },
        Some(first) => Outcome {
            ok: false,
            detail: format!("{} failure(s), first: {first}", failures.len()),
        },
    }
}

fn xos_params() -> Parameters {
    parameters_for(ValuationClass::Xos).unwrap().parameters()
}

fn mph_params(k: usize) -> Vec<Parameters> {
    vec![
        parameters_for(ValuationClass::MphBalanced { k }).unwrap().parameters(),
        parameters_for(ValuationClass::MphImproved { k }).unwrap().parameters(),
    ]
}

fn exact_welfare(inst: &Instance, prices: &PriceVector) -> f64 {
    expected_welfare(inst, prices, WelfareMode::Exact).unwrap().mean
}

/// Solve, extract prices, and check the objective and welfare for one
/// parameter set.
fn existence(case: &Case, p: Parameters, label: &str, failures: &mut Vec<String>) -> f64 {
    let sol = solve_primal(&case.inst, &case.stats, p).unwrap();
    let (prices, objective) = match prices_from_primal(&sol) {
        Ok(x) => x,
        Err(e) => {
            failures.push(format!("{label}: {e}"));
            return f64::NAN;
        }
    };
    if objective < -1e-7 {
        failures.push(format!("{label}: primal optimum {objective:e}"));
    }
    let welfare = exact_welfare(&case.inst, &prices);
    let opt = case.stats.expected_optimum;
    let ratio = opt / welfare;
    if p.alpha == 2.0 {
        if welfare < 0.5 * opt - 1e-9 {
            failures.push(format!("{label}: welfare {welfare} < E[OPT]/2 = {}", 0.5 * opt));
        }
    } else if opt > 0.0 && !(ratio <= p.alpha + 1e-6) {
        failures.push(format!("{label}: ratio {ratio} > alpha {}", p.alpha));
    }
    if opt > 0.0 {
        ratio
    } else {
        1.0
    }
}

fn criterion1(cases: &[Case]) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut failures = vec![];
    let mut worst = 0.0f64;
    for (n, case) in cases.iter().enumerate() {
        worst = worst.max(existence(case, case.params[0], &format!("xos #{n}"), &mut failures));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        failures.push(format!("runtime {elapsed:?} > 60s"));
    }
    let summary = format!("{} instances, worst ratio {worst:.6}, {elapsed:.2?}", cases.len());
    (outcome(&failures, summary), elapsed)
}

fn criterion2(cases: &[Case]) -> Outcome {
    let start = Instant::now();
    let mut failures = vec![];
    let mut worst = 0.0f64;
    for (n, case) in cases.iter().enumerate() {
        for &p in &case.params {
            let label = format!("mph #{n} alpha={:.4}", p.alpha);
            worst = worst.max(existence(case, p, &label, &mut failures) / p.alpha);
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        failures.push(format!("runtime {elapsed:?} > 120s"));
    }
    outcome(
        &failures,
        format!(
            "{} instances x 2 parameter sets, worst ratio/alpha {worst:.6}, {elapsed:.2?}",
            cases.len()
        ),
    )
}

fn criterion3() -> Outcome {
    let mut failures = vec![];
    let mut worst = 0.0f64;
    for k in 2..=10 {
        let balanced = parameters_for(ValuationClass::MphBalanced { k }).unwrap();
        let improved = parameters_for(ValuationClass::MphImproved { k }).unwrap();
        for c in [balanced, improved] {
            let r = mph_identity_residual(k, c.alpha, c.beta);
            worst = worst.max(r.abs());
            if !(r.abs() < 1e-12) {
                failures.push(format!("{}: residual {r:e}", c.class));
            }
        }
        if !(improved.alpha < balanced.alpha) {
            failures.push(format!("k={k}: improved {} >= balanced {}", improved.alpha, balanced.alpha));
        }
    }
    outcome(&failures, format!("k=2..10, max |residual| {worst:e}"))
}

fn criterion4(cases: &[Case]) -> Outcome {
    let mut failures = vec![];
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (n, case) in cases.iter().enumerate() {
        for &p in &case.params {
            let primal = solve_primal(&case.inst, &case.stats, p).unwrap();
            let dual = solve_dual(&case.inst, &case.stats, p).unwrap();
            if !primal.is_optimal() || !dual.is_optimal() {
                failures.push(format!("#{n}: statuses {:?}/{:?}", primal.status, dual.status));
                continue;
            }
            let gap = (primal.objective - dual.objective).abs();
            worst = worst.max(gap);
            checked += 1;
            if !(gap <= 1e-7) {
                failures.push(format!("#{n} alpha={}: gap {gap:e}", p.alpha));
            }
        }
    }
    outcome(&failures, format!("{checked} primal/dual pairs, max gap {worst:e}"))
}

fn criterion5(cases: &[Case]) -> Outcome {
    let mut failures = vec![];
    let mut certs_checked = 0;
    let (mut worst_abs, mut worst_claim, mut worst_obj) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for (n, case) in cases.iter().enumerate() {
        let m = case.inst.items();
        for (pi, &p) in case.params.iter().enumerate() {
            let mut certs = vec![];
            match DualCertificate::from_dual_solution(m, &solve_dual(&case.inst, &case.stats, p).unwrap()) {
                Ok(c) => certs.push(("optimal".to_string(), c)),
                Err(e) => failures.push(format!("#{n}: optimal dual unavailable: {e}")),
            }
            let mut r = rng(77_000 + 100 * n as u64 + pi as u64);
            for c in 0..20 {
                certs.push((format!("random {c}"), random_feasible_certificate(m, p.beta, &mut r).unwrap()));
            }
            for (name, cert) in &certs {
                certs_checked += 1;
                let absence = check_dual_feasible(cert, p).into_iter().fold(f64::INFINITY, f64::min);
                let (claim, at) = worst_claim1(cert, &case.inst, p);
                let obj = dual_objective(cert, &case.inst, &case.stats, p);
                worst_abs = worst_abs.min(absence);
                worst_claim = worst_claim.min(claim);
                worst_obj = worst_obj.min(obj);
                if absence < -1e-9 {
                    failures.push(format!("#{n} {name}: absence margin {absence:e}"));
                }
                if claim < -1e-7 {
                    failures.push(format!("#{n} {name}: claim margin {claim:e} at {at:?}"));
                }
                if obj < -1e-7 {
                    failures.push(format!("#{n} {name}: dual objective {obj:e}"));
                }
            }
        }
    }
    outcome(
        &failures,
        format!(
            "{certs_checked} certificates, min margins: absence {worst_abs:.3e}, per-bundle {worst_claim:.3e}, objective {worst_obj:.3e}"
        ),
    )
}

fn criterion6(cases: &[Case]) -> Outcome {
    let mut failures = vec![];
    let mut checked = 0;
    let mut worst = f64::INFINITY;
    for (n, case) in cases.iter().enumerate() {
        let mut r = rng(88_000 + n as u64);
        let max_value = case.inst.max_value();
        for _ in 0..20 {
            let prices = PriceVector::new(common::random_prices(case.inst.items(), max_value, &mut r)).unwrap();
            let welfare = exact_welfare(&case.inst, &prices);
            for &p in &case.params {
                let (bound, t) = lemma1_bound(&case.inst, &case.stats, &prices, p.beta);
                checked += 1;
                worst = worst.min(welfare - bound);
                if welfare < bound - 1e-9 {
                    failures.push(format!("#{n} beta={}: welfare {welfare} < bound {bound} at T={t}", p.beta));
                }
            }
        }
    }
    outcome(&failures, format!("{checked} (prices, beta) pairs, min slack {worst:.3e}"))
}

fn criterion7(cases: &[Case]) -> Outcome {
    let mut failures = vec![];
    let mut worst = f64::INFINITY;
    let p = xos_params();
    for (n, case) in cases.iter().enumerate() {
        let prices = match fgl_prices(&case.inst, &case.stats) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("#{n}: {e}"));
                continue;
            }
        };
        let oracle = common::fgl_oracle(&case.inst, &case.stats);
        let drift = prices.as_slice().iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if drift > 1e-12 {
            failures.push(format!("#{n}: prices {:?} differ from oracle {oracle:?}", prices.as_slice()));
        }
        let margin = verify_feasible_point(&case.inst, &case.stats, p, &prices).unwrap();
        worst = worst.min(margin);
        if margin < -1e-7 {
            failures.push(format!("#{n}: margin {margin:e}"));
        }
    }
    outcome(&failures, format!("{} instances, min margin {worst:.3e}", cases.len()))
}

fn criterion8() -> Outcome {
    let inst = tightness();
    let stats = opt_stats(&inst).unwrap();
    let mut failures = vec![];
    if stats.expected_optimum != 1.9 {
        failures.push(format!("E[OPT] = {} != 1.9", stats.expected_optimum));
    }
    let objective = |alpha: f64| {
        let sol = solve_primal(&inst, &stats, Parameters::new(alpha, 1.0).unwrap()).unwrap();
        prices_from_primal(&sol).map(|(_, o)| o)
    };
    let (at2, at18) = (objective(2.0), objective(1.8));
    match &at2 {
        Ok(o) if *o >= 0.0 => {}
        other => failures.push(format!("alpha=2: {other:?}")),
    }
    match &at18 {
        Ok(o) if *o < 0.0 => {}
        other => failures.push(format!("alpha=1.8: {other:?}")),
    }
    outcome(
        &failures,
        format!(
            "E[OPT]={}, objective {:e} at alpha=2, {:e} at alpha=1.8",
            stats.expected_optimum,
            at2.unwrap_or(f64::NAN),
            at18.unwrap_or(f64::NAN)
        ),
    )
}

fn criterion9() -> Outcome {
    let mut failures = vec![];
    let mut r = rng(99);
    for s in 0..100u64 {
        let class = if s % 2 == 0 {
            prophet_prices::instances::GeneratorClass::Xos
        } else {
            prophet_prices::instances::GeneratorClass::Mph { k: 2 + (s % 4 == 1) as usize }
        };
        let inst = random_instance(class, 4, 99_000 + s);
        let profile = inst.sample_profile(&mut r);
        let (alloc, full) = optimal_allocation(&profile.valuations, inst.items()).unwrap();
        let partial = partial_optimum(&profile.valuations, inst.items());
        if !alloc.is_disjoint() || alloc.covered().len() != inst.items() {
            failures.push(format!("profile {s}: allocation not a partition"));
        }
        if (full - partial).abs() > 1e-12 * partial.abs().max(1.0) {
            failures.push(format!("profile {s}: full {full} vs partial {partial}"));
        }
    }
    outcome(&failures, "100 profiles, m <= 4".to_string())
}

fn main() -> ExitCode {
    let xos: Vec<Case> = xos_corpus(50)
        .into_iter()
        .map(|inst| Case {
            stats: opt_stats(&inst).unwrap(),
            inst,
            params: vec![xos_params()],
        })
        .collect();
    let mph: Vec<Case> = [2, 3]
        .into_iter()
        .flat_map(|k| mph_corpus(k, 30).into_iter().map(move |inst| (k, inst)))
        .map(|(k, inst)| Case {
            stats: opt_stats(&inst).unwrap(),
            inst,
            params: mph_params(k),
        })
        .collect();
    let all: Vec<&Case> = xos.iter().chain(&mph).collect();
    let on_both = |f: fn(&[Case]) -> Outcome| {
        let a = f(&xos);
        let b = f(&mph);
        (a, b)
    };

    let mut results: Vec<(&str, Outcome)> = vec![];
    let (c1, _) = criterion1(&xos);
    results.push(("1 XOS existence (alpha=2, beta=1)", c1));
    results.push(("2 MPH-k existence (k=2,3; both variants)", criterion2(&mph)));
    results.push(("3 parameter identities (k=2..10)", criterion3()));
    for (name, f) in [
        ("4 strong duality", criterion4 as fn(&[Case]) -> Outcome),
        ("5 absence / per-bundle / dual objective", criterion5),
        ("6 welfare lower bound at random prices", criterion6),
    ] {
        let (a, b) = on_both(f);
        let merged = Outcome {
            ok: a.ok && b.ok,
            detail: format!("xos: {}; mph: {}", a.detail, b.detail),
        };
        results.push((name, merged));
    }
    results.push(("7 contribution prices on XOS corpus", criterion7(&xos)));
    results.push(("8 single-item tightness", criterion8()));
    results.push(("9 full vs partial allocation optimum", criterion9()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {} of {} criteria passed ({} instances)", results.len() - failed, results.len(), all.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

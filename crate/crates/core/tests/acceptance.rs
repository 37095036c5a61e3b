//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Runtime budgets refer to the optimized test profile of this workspace.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hermult_core::hermite::eval_phi_1d;
use hermult_core::nuclearity::{
    compare_sr_kappa, gl_condition_exact, symbol_power_sum, RegimeCase,
};
use hermult_core::quadrature::fit_norm_exponent;
use hermult_core::spectral::kernel_series;
use hermult_core::trace::galerkin_eigenvalues;
use hermult_core::{
    analyze, apply_multiplier, classify_regime, enumerate_up_to, gauss_hermite_rule, gl_condition,
    kappa_sum, mehler_kernel, s_r_sum, semigroup_trace_closed_form, synthesize,
    trace_diagonal_quadrature, trace_symbol_sum, CompensatedSum, Exponent, MultiIndex, Symbol,
    Verdict,
};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ex(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: u32, title: &str, budget: Option<Duration>, check: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let outcome = match (outcome, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("runtime {elapsed:.2?} exceeds {b:?}")),
        (o, _) => o,
    };
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id} [{tag}] {title} ({:.2} s): {detail}", elapsed.as_secs_f64());
    outcome.is_ok()
}

fn semigroup_trace_identity() -> Check {
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        for t in [0.5, 1.0, 2.0] {
            let heat = Symbol::heat(t).map_err(|e| e.to_string())?;
            let closed = 1.0 / (t.exp() - (-t).exp()).powi(n as i32);
            let series = trace_symbol_sum(&heat, n, 1e-12).map_err(|e| e.to_string())?;
            let diag = trace_diagonal_quadrature(&heat, n, series.truncation_order, 1e-10)
                .map_err(|e| e.to_string())?;
            let lib_closed = semigroup_trace_closed_form(t, n).map_err(|e| e.to_string())?;
            for (route, v) in [("symbol sum", series.value), ("diagonal quadrature", diag.value)] {
                let err = (v - closed).abs();
                worst = worst.max(err);
                ensure(err < 1e-8, || format!("{route} at t={t}, n={n}: error {err:e}"))?;
            }
            ensure((lib_closed.value - closed).abs() < 1e-14 * closed, || {
                format!("closed form at t={t}, n={n}: {} vs {closed}", lib_closed.value)
            })?;
        }
    }
    Ok(format!("max |route − (e^t − e^-t)^-n| = {worst:.2e} over 9 configurations"))
}

fn mehler_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d65_686c);
    let mut worst = 0.0f64;
    let mut configs = 0;
    for n in 1..=3usize {
        for t in [0.5, 1.0, 2.0] {
            let heat = Symbol::heat(t).map_err(|e| e.to_string())?;
            for _ in 0..10 {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let mut order = 8;
                let series = loop {
                    let s = kernel_series(&heat, &x, &y, order).map_err(|e| e.to_string())?;
                    if s.tail_bound.is_some_and(|b| b < 1e-9) {
                        break s;
                    }
                    if order > 4096 {
                        return fail(format!("no certified tail below 1e-9 at t={t}, n={n}"));
                    }
                    order *= 2;
                };
                let closed = mehler_kernel(t, &x, &y).map_err(|e| e.to_string())?;
                let err = (series.value - closed).abs();
                worst = worst.max(err);
                ensure(err < 1e-8, || format!("t={t}, n={n}, x={x:?}, y={y:?}: error {err:e}"))?;
            }
            configs += 1;
        }
    }
    Ok(format!("max |series − Mehler| = {worst:.2e} at 10 random points × {configs} configurations"))
}

fn norm_asymptotics() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    let targets: [(Exponent, f64, f64); 5] = [
        (ex(1.0), 0.25, 0.02),
        (ex(2.0), 0.0, 0.01),
        (ex(4.0), -0.125, 0.03),
        (ex(6.0), -1.0 / 9.0, 0.02),
        (Exponent::INFINITY, -1.0 / 12.0, 0.02),
    ];
    for (p, target, tol) in targets {
        let fit = fit_norm_exponent(p, 200, 2000, 10, 1e-8).map_err(|e| e.to_string())?;
        let pass = (fit.power - target).abs() <= tol;
        ok &= pass;
        let log = fit.log_power.map_or(String::new(), |l| format!(", ln-power {l:.4} (reported)"));
        lines.push(format!("p={p}: slope {:.4} (target {target:.4} ± {tol}){log}", fit.power));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const NINE_CASES: [(f64, f64); 9] = [
    (2.0, 2.0),
    (4.0 / 3.0, 2.0),
    (1.2, 2.0),
    (2.0, 4.0),
    (4.0 / 3.0, 4.0),
    (1.2, 4.0),
    (2.0, 6.0),
    (4.0 / 3.0, 6.0),
    (1.2, 6.0),
];

fn criterion_consistency() -> Check {
    let mut worst_drift = 0.0f64;
    let mut tags = std::collections::BTreeSet::new();
    for t in [0.5, 1.0] {
        let heat = Symbol::heat(t).map_err(|e| e.to_string())?;
        for (p1, p2) in NINE_CASES {
            let case: RegimeCase =
                classify_regime(ex(p1), ex(p2), 1.0, 10).map_err(|e| e.to_string())?;
            tags.insert(format!("{:?}/{:?}", case.p2_regime, case.p1_branch));
            let kappa = kappa_sum(&heat, &case, 1, 80, 1e-8).map_err(|e| e.to_string())?;
            let sr = s_r_sum(&heat, ex(p1), ex(p2), 1.0, 1, 80, 1e-8).map_err(|e| e.to_string())?;
            for (name, rep) in [("kappa", &kappa), ("s_r", &sr)] {
                ensure(rep.verdict == Verdict::Finite, || {
                    format!("{name} verdict {:?} at t={t}, p1={p1}, p2={p2}", rep.verdict)
                })?;
            }
            let cmp = compare_sr_kappa(&heat, &case, 1, 80).map_err(|e| e.to_string())?;
            let drift = cmp.drift.ok_or_else(|| format!("ratio undefined at t={t}, p1={p1}, p2={p2}"))?;
            worst_drift = worst_drift.max(drift);
            ensure(drift < 0.05, || format!("drift {drift:.4} at t={t}, p1={p1}, p2={p2}"))?;
        }
    }
    ensure(tags.len() == 9, || format!("only {} distinct regime cases: {tags:?}", tags.len()))?;
    let case = classify_regime(ex(2.0), ex(2.0), 1.0, 10).map_err(|e| e.to_string())?;
    let one = kappa_sum(&Symbol::constant(1.0), &case, 1, 80, 1e-8).map_err(|e| e.to_string())?;
    ensure(one.verdict == Verdict::Divergent, || format!("m ≡ 1 verdict {:?}", one.verdict))?;
    Ok(format!(
        "18 configurations finite, max s_r/ϰ drift N=80→160 {worst_drift:.2e}; m ≡ 1 divergent"
    ))
}

fn exact_special_case() -> Check {
    let table = Symbol::table([
        (MultiIndex::from([0, 0]), 0.3),
        (MultiIndex::from([2, 5]), -1.7),
        (MultiIndex::from([13, 1]), 2.5),
    ])
    .map_err(|e| e.to_string())?;
    let symbols = [
        ("heat(0.5)", Symbol::heat(0.5).unwrap()),
        ("power(1.5)", Symbol::power(1.5).unwrap()),
        ("table", table),
    ];
    let mut checked = 0;
    for p in [1.5, 2.0, 3.0, 3.9] {
        for r in [1.0, 0.5] {
            for (name, m) in &symbols {
                let dims: &[usize] = if *name == "table" { &[2] } else { &[1, 2] };
                for &n in dims {
                    let case = classify_regime(ex(p), ex(p), r, 10).map_err(|e| e.to_string())?;
                    let kappa = kappa_sum(m, &case, n, 40, 1e-8).map_err(|e| e.to_string())?;
                    let plain = symbol_power_sum(m, r, n, 40).map_err(|e| e.to_string())?;
                    let mut naive = CompensatedSum::new();
                    for nu in enumerate_up_to(n, 40).map_err(|e| e.to_string())? {
                        let v = m.eval(&nu);
                        if v != 0.0 {
                            naive.add(if r == 1.0 { v.abs() } else { v.abs().powf(r) });
                        }
                    }
                    ensure(kappa.partial_sum.to_bits() == plain.to_bits(), || {
                        format!("{name}, p={p}, r={r}, n={n}: {} vs {plain}", kappa.partial_sum)
                    })?;
                    ensure(kappa.partial_sum.to_bits() == naive.value().to_bits(), || {
                        format!("{name}, p={p}, r={r}, n={n}: {} vs naive {}", kappa.partial_sum, naive.value())
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (symbol, p, r, n) combinations bit-identical"))
}

fn orthonormality_and_action() -> Check {
    let rule = gauss_hermite_rule(51).map_err(|e| e.to_string())?;
    let tables: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| (0..=50).map(|a| eval_phi_1d(a, x).unwrap().to_f64()).collect())
        .collect();
    let mut worst_gram = 0.0f64;
    for a in 0..=50usize {
        for b in 0..=50usize {
            let g: f64 = tables
                .iter()
                .zip(rule.dx_weights())
                .map(|(row, w)| w * row[a] * row[b])
                .sum();
            let err = (g - if a == b { 1.0 } else { 0.0 }).abs();
            worst_gram = worst_gram.max(err);
        }
    }
    ensure(worst_gram < 1e-12, || format!("Gram matrix error {worst_gram:e}"))?;

    let analysis_rule = gauss_hermite_rule(40).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (-24..=24).map(|i| f64::from(i) * 0.25).collect();
    let mut worst_action = 0.0f64;
    for (name, m) in [("heat(1)", Symbol::heat(1.0).unwrap()), ("power(1)", Symbol::power(1.0).unwrap())] {
        for nu in 0..=20u32 {
            let c = analyze(|x| eval_phi_1d(nu, x[0]).unwrap().to_f64(), 1, 30, &analysis_rule)
                .map_err(|e| e.to_string())?;
            let tc = apply_multiplier(&m, &c);
            let mv = m.eval(&MultiIndex::from(nu));
            for &x in &grid {
                let lhs = synthesize(&tc, &[x]).map_err(|e| e.to_string())?;
                let rhs = mv * eval_phi_1d(nu, x).unwrap().to_f64();
                let err = (lhs - rhs).abs();
                worst_action = worst_action.max(err);
                ensure(err < 1e-8, || format!("{name}, ν={nu}, x={x}: error {err:e}"))?;
            }
        }
    }
    Ok(format!(
        "max Gram error {worst_gram:.2e} (μ,ν ≤ 50); max |T_m φ_ν − m(ν)φ_ν| {worst_action:.2e} on 49 grid points, ν ≤ 20"
    ))
}

fn gl_exponent() -> Check {
    let r = |a: i64, b: i64| gl_condition_exact(Ratio::new(a, b)).map_err(|e| e.to_string());
    ensure(r(2, 1)? == Ratio::from_integer(1), || "r(2) ≠ 1".into())?;
    ensure(r(1, 1)? == Ratio::new(2, 3), || "r(1) ≠ 2/3".into())?;
    ensure(r(4, 3)? == r(4, 1)?, || format!("r(4/3) = {} but r(4) = {}", r(4, 3).unwrap(), r(4, 1).unwrap()))?;
    ensure(r(4, 1)? == Ratio::new(4, 5), || "r(4) ≠ 4/5".into())?;
    ensure(gl_condition(Exponent::TWO) == 1.0, || "float r(2) ≠ 1".into())?;
    ensure(gl_condition(Exponent::ONE) == 2.0 / 3.0, || "float r(1) ≠ 2/3".into())?;
    ensure(gl_condition(Exponent::INFINITY) == gl_condition(Exponent::ONE), || "float r(∞) ≠ r(1)".into())?;
    for p in [4.0 / 3.0, 4.0] {
        let q = ex(p).conjugate();
        ensure(gl_condition(ex(p)) == gl_condition(q), || format!("float r({p}) ≠ r({})", q.value()))?;
    }
    Ok("r(2) = 1, r(1) = r(∞) = 2/3, r(4/3) = r(4) = 4/5 exactly".into())
}

fn spectral_vs_nuclear() -> Check {
    let heat = Symbol::heat(1.0).map_err(|e| e.to_string())?;
    let trace = trace_symbol_sum(&heat, 1, 1e-14).map_err(|e| e.to_string())?;
    let spectrum = galerkin_eigenvalues(&heat, 1, 59).map_err(|e| e.to_string())?;
    ensure(spectrum.eigenvalues.len() == 60, || format!("{} eigenvalues", spectrum.eigenvalues.len()))?;
    let err = (spectrum.eigenvalue_sum - trace.value).abs();
    ensure(err < 1e-10, || format!("eigenvalue sum {} vs trace {}: {err:e}", spectrum.eigenvalue_sum, trace.value))?;
    Ok(format!(
        "60×60 Galerkin ({:?}) eigenvalue sum {:.13} vs Σ m(ν) {:.13}: error {err:.2e}",
        spectrum.route, spectrum.eigenvalue_sum, trace.value
    ))
}

fn main() -> ExitCode {
    let minutes = |m: u64| Some(Duration::from_secs(60 * m));
    let results = [
        run(1, "semigroup trace identity", Some(Duration::from_secs(10)), semigroup_trace_identity),
        run(2, "Mehler agreement", Some(Duration::from_secs(30)), mehler_agreement),
        run(3, "norm asymptotics", minutes(5), norm_asymptotics),
        run(4, "criterion consistency", minutes(5), criterion_consistency),
        run(5, "exact special case", None, exact_special_case),
        run(6, "orthonormality and eigenfunction action", None, orthonormality_and_action),
        run(7, "GL exponent", None, gl_exponent),
        run(8, "spectral vs nuclear trace", None, spectral_vs_nuclear),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

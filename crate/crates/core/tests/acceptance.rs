//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::f64::consts::SQRT_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use nlocal::closedform::{
    cauchy_schwarz_check, chain_cauchy_schwarz, chain_ij_factorized, chain_inequality_value, chain_max, chsh_max, star_max, Convention,
};
use nlocal::matkernel::ComplexMatrix;
use nlocal::netmodel::{bell_basis, bj_table, bob_observable, ChainNetwork, StarNetwork};
use nlocal::oracle::{chain_ij_full, dichotomy_search, optimize_chain, optimize_star, star_ij_full, OptimizerConfig};
use nlocal::qstate::{random_state, random_su2, TwoQubitState};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.1} s, limit {:.0} s", t.as_secs_f64(), limit.as_secs_f64()))
}

fn chain(sources: Vec<TwoQubitState>) -> ChainNetwork {
    ChainNetwork::new(sources).unwrap()
}

fn star(sources: Vec<TwoQubitState>) -> StarNetwork {
    StarNetwork::new(sources).unwrap()
}

fn cfg() -> OptimizerConfig {
    OptimizerConfig::default()
}

fn bilocal_bell_pair() -> Outcome {
    let start = Instant::now();
    let net = chain(vec![bell(), bell()]);
    let normalized = chain_max(&net, Convention::Normalized).unwrap();
    let paper = chain_max(&net, Convention::PaperScale).unwrap();
    ensure((normalized.closed_form_max - SQRT_2).abs() < 1e-12, || format!("normalized {}", normalized.closed_form_max))?;
    ensure((paper.closed_form_max - 2.0 * SQRT_2).abs() < 1e-12, || format!("paper scale {}", paper.closed_form_max))?;
    ensure(normalized.violation && paper.classical_bound == 2.0, || "verdict or bound".into())?;
    let o = optimize_chain(&net, &cfg()).unwrap();
    ensure((o.value - SQRT_2).abs() < 1e-6, || format!("oracle {}", o.value))?;
    within_time(start, Duration::from_secs(5))?;
    Ok(format!("closed form {:.9}, oracle {:.9}", normalized.closed_form_max, o.value))
}

fn three_local_bell_triple() -> Outcome {
    let start = Instant::now();
    let net = chain(vec![bell(), bell(), bell()]);
    let r = chain_max(&net, Convention::Normalized).unwrap();
    ensure((r.closed_form_max - SQRT_2).abs() < 1e-12 && r.classical_bound == 1.0, || {
        format!("closed form {} bound {}", r.closed_form_max, r.classical_bound)
    })?;
    let o = optimize_chain(&net, &cfg()).unwrap();
    ensure((o.value - SQRT_2).abs() < 1e-4, || format!("oracle {}", o.value))?;
    within_time(start, Duration::from_secs(30))?;
    Ok(format!("closed form {:.9}, oracle {:.9}", r.closed_form_max, o.value))
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12).collect()
}

fn first_violation(points: &[f64], verdict: impl Fn(f64) -> bool) -> Result<f64, String> {
    let flags: Vec<bool> = points.iter().map(|&v| verdict(v)).collect();
    let k = flags.iter().position(|&f| f).ok_or("no violation on the grid")?;
    ensure(flags[k..].iter().all(|&f| f), || "verdict flips back".into())?;
    Ok(points[k])
}

fn werner_chain_threshold() -> Outcome {
    let points = grid(0.60, 0.80, 0.005);
    let flip = first_violation(&points, |v| {
        chain_max(&chain(vec![werner(v), werner(v)]), Convention::Normalized).unwrap().violation
    })?;
    ensure((flip - 0.710).abs() < 1e-12, || format!("flip at {flip}"))?;
    let mut worst = 0.0f64;
    for v in [0.705, 0.710, 0.715] {
        let net = chain(vec![werner(v), werner(v)]);
        let closed = chain_max(&net, Convention::Normalized).unwrap();
        let o = optimize_chain(&net.aligned(), &cfg()).unwrap();
        worst = worst.max((o.value - closed.closed_form_max).abs());
        ensure((o.value > 1.0) == closed.violation, || format!("oracle verdict differs at v = {v}"))?;
    }
    ensure(worst < 1e-4, || format!("oracle gap {worst:e}"))?;
    Ok(format!("flip at v = {flip:.3}, oracle gap {worst:.1e}"))
}

fn horodecki_chsh() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let s = random_state(&mut r);
        let brute = brute_force_chsh(&s, k);
        worst = worst.max((brute - chsh_max(&s)).abs());
    }
    ensure(worst <= 1e-4, || format!("max gap {worst:e}"))?;
    within_time(start, Duration::from_secs(60))?;
    Ok(format!("max gap {worst:.1e} over 100 states"))
}

fn cauchy_schwarz() -> Outcome {
    let mut r = rng(5);
    let mut failures = 0;
    let mut margin = f64::INFINITY;
    for _ in 0..1000 {
        let c = cauchy_schwarz_check(&random_state(&mut r), &random_state(&mut r));
        failures += usize::from(!(c.lhs <= c.rhs + 1e-9));
        margin = margin.min(c.rhs - c.lhs);
    }
    for _ in 0..200 {
        let c = chain_cauchy_schwarz(&chain((0..3).map(|_| random_state(&mut r)).collect()));
        failures += usize::from(!(c.lhs <= c.rhs + 1e-9));
        margin = margin.min(c.rhs - c.lhs);
    }
    ensure(failures == 0, || format!("{failures} failures"))?;
    Ok(format!("0 failures in 1200 cases, smallest margin {margin:.1e}"))
}

fn star_bell_triple() -> Outcome {
    let start = Instant::now();
    let net = star(vec![bell(), bell(), bell()]);
    let r = star_max(&net);
    ensure((r.closed_form_max - 2.0 * SQRT_2).abs() < 1e-12 && r.classical_bound == 2.0, || {
        format!("closed form {} bound {}", r.closed_form_max, r.classical_bound)
    })?;
    let aligned = net.aligned();
    let o = optimize_star(&aligned, &cfg()).unwrap();
    ensure((o.value - 2.0 * SQRT_2).abs() < 1e-4, || format!("oracle {}", o.value))?;
    for j in 0..4 {
        let rep = dichotomy_search(&aligned, &o.settings, j).unwrap();
        ensure(rep.tabulated_is_optimal == Some(true), || format!("b^{} not optimal: {rep:?}", j + 1))?;
    }
    within_time(start, Duration::from_secs(120))?;
    Ok(format!("closed form {:.9}, oracle {:.9}, tabulated b^j optimal", r.closed_form_max, o.value))
}

fn star_two_party_reduction() -> Outcome {
    let mut r = rng(7);
    let (mut closed_gap, mut oracle_gap, mut settings_gap) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let net = star(vec![random_state(&mut r), random_state(&mut r)]);
        let as_chain = net.as_chain().unwrap();
        closed_gap = closed_gap.max(
            (star_max(&net).closed_form_max - chain_max(&as_chain, Convention::Normalized).unwrap().closed_form_max)
                .abs(),
        );
        let aligned = net.aligned();
        let aligned_chain = aligned.as_chain().unwrap();
        let so = optimize_star(&aligned, &cfg()).unwrap();
        let co = optimize_chain(&aligned_chain, &cfg()).unwrap();
        oracle_gap = oracle_gap.max((so.value - co.value).abs());
        // The star optimum, read as chain settings, gives the same terms.
        let cs = so.settings.to_chain_settings().unwrap();
        let (i, j) = chain_ij_full(&aligned_chain, &cs).unwrap();
        let (si, sj) = (star_ij_full(&aligned, &so.settings, 0).unwrap(), star_ij_full(&aligned, &so.settings, 1).unwrap());
        settings_gap = settings_gap.max((i - si).abs()).max((j - sj).abs());
        settings_gap = settings_gap.max((chain_inequality_value(i, j) - so.value).abs());
    }
    ensure(closed_gap <= 1e-12, || format!("closed-form gap {closed_gap:e}"))?;
    ensure(oracle_gap <= 1e-6, || format!("oracle gap {oracle_gap:e}"))?;
    ensure(settings_gap <= 1e-12, || format!("settings correspondence gap {settings_gap:e}"))?;
    Ok(format!("closed-form gap {closed_gap:.1e}, oracle gap {oracle_gap:.1e}"))
}

fn generalized_bell_basis() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=6 {
        let b = bell_basis(n).unwrap();
        worst = worst.max(b.gram_deviation()).max(b.completeness_deviation());
    }
    ensure(worst <= 1e-12, || format!("basis deviation {worst:e}"))?;
    let mut obs_worst = 0.0f64;
    let mut count = 0;
    for n in 2..=4 {
        let id = ComplexMatrix::identity(1 << n);
        for j in 0..bj_table(n).unwrap().len() {
            let b = bob_observable(n, j).unwrap();
            obs_worst = obs_worst.max(b.trace().norm()).max(b.matmul(&b).unwrap().max_abs_diff(&id));
            count += 1;
        }
    }
    ensure(obs_worst <= 1e-12, || format!("observable deviation {obs_worst:e}"))?;
    Ok(format!("basis deviation {worst:.1e}, {count} observables deviation {obs_worst:.1e}"))
}

fn factorized_vs_full() -> Outcome {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let n = 2 + k % 3;
        let net = chain((0..n).map(|_| random_state(&mut r)).collect());
        let s = random_chain_settings(&mut r);
        let (i, j) = chain_ij_factorized(&net, &s);
        let (fi, fj) = chain_ij_full(&net, &s).unwrap();
        worst = worst.max((i - fi).abs()).max((j - fj).abs());
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e} over 200 samples"))
}

fn local_unitary_invariance() -> Outcome {
    let mut r = rng(10);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let n = 2 + k % 3;
        let src: Vec<_> = (0..n).map(|_| random_state(&mut r)).collect();
        let rotated: Vec<_> = src
            .iter()
            .map(|s| s.conjugate_local(&random_su2(&mut r), &random_su2(&mut r)).unwrap())
            .collect();
        let c = |s: Vec<_>| chain_max(&chain(s), Convention::Normalized).unwrap().closed_form_max;
        let st = |s: Vec<_>| star_max(&star(s)).closed_form_max;
        worst = worst.max((c(src.clone()) - c(rotated.clone())).abs());
        worst = worst.max((st(src) - st(rotated)).abs());
    }
    ensure(worst <= 1e-10, || format!("closed-form change {worst:e}"))?;
    let mut gap = 0.0f64;
    for k in 0..20 {
        let n = 2 + k % 2;
        let net = chain((0..n).map(|_| random_state(&mut r)).collect());
        let closed = chain_max(&net, Convention::Normalized).unwrap().closed_form_max;
        gap = gap.max((optimize_chain(&net.aligned(), &cfg()).unwrap().value - closed).abs());
    }
    ensure(gap <= 1e-4, || format!("aligned oracle gap {gap:e}"))?;
    Ok(format!("closed-form change {worst:.1e}, aligned oracle gap {gap:.1e}"))
}

fn star_werner_threshold() -> Outcome {
    let points = grid(0.60, 0.80, 0.005);
    let threshold = 0.5f64.sqrt();
    let flip = first_violation(&points, |v| star_max(&star(vec![werner(v); 3])).violation)?;
    let expected = points.iter().copied().find(|&v| v > threshold).unwrap();
    ensure(flip == expected, || format!("flip at {flip}, expected {expected}"))?;
    let mut worst = 0.0f64;
    for v in [0.705, 0.710, 0.715] {
        let net = star(vec![werner(v); 3]);
        let closed = star_max(&net);
        let o = optimize_star(&net.aligned(), &cfg()).unwrap();
        worst = worst.max((o.value - closed.closed_form_max).abs());
        ensure((o.value > closed.classical_bound) == closed.violation, || format!("oracle verdict differs at v = {v}"))?;
    }
    ensure(worst < 1e-4, || format!("oracle gap {worst:e}"))?;
    Ok(format!("flip at v = {flip:.3}, oracle gap {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("bilocal Bell pair", bilocal_bell_pair),
        ("3-local Bell triple", three_local_bell_triple),
        ("Werner chain threshold", werner_chain_threshold),
        ("CHSH maximum vs brute force", horodecki_chsh),
        ("Cauchy-Schwarz relation", cauchy_schwarz),
        ("star of three Bell sources", star_bell_triple),
        ("two-party star reduces to chain", star_two_party_reduction),
        ("generalized Bell basis", generalized_bell_basis),
        ("factorized vs full-tensor terms", factorized_vs_full),
        ("local-unitary invariance", local_unitary_invariance),
        ("star Werner threshold", star_werner_threshold),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2} s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2} s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

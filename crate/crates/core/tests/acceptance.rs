//! End-to-end acceptance checks. Each `c..` test prints one PASS/FAIL
//! line (visible with `--nocapture`) and asserts the same condition.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use stopgame::asymptotics::{
    exact_expected_count, expected_count_limit, kstar_crossing_limit, lower_bound_l, normal_cdf,
    theta_of, window_expected_count,
};
use stopgame::mean_field::{find_solutions, quartet, MfClass, SolveCfg};
use stopgame::monte_carlo::{
    estimate_near, extremal_law, run_histogram, ExperimentConfig, SetSelector,
};
use stopgame::n_player::{double_fixed_point, enumerate, track_flow, SignalSample};
use stopgame::rng::{sample_uniforms, uniform};
use stopgame::signal::{GameParams, Preset};
use stopgame::MfFlow64;

fn report(num: u32, what: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {num:02} ({what}): {verdict} — {detail}");
    assert!(ok, "criterion {num:02} failed: {detail}");
}

#[test]
fn c01_tent_roots_and_classes() {
    let (m, p) = Preset::Tent.build::<f64>();
    let sols = find_solutions(&m, &p, 0.0, &SolveCfg::default()).unwrap();
    let mut ok = sols.len() == 3;
    let want = [
        (0.0, MfClass::IncreasingTransversal),
        (0.5, MfClass::DecreasingTransversal),
        (1.0, MfClass::IncreasingTransversal),
    ];
    let mut detail = String::new();
    for (sol, (u, class)) in sols.iter().zip(want) {
        ok &= (sol.u - u).abs() <= 1e-9 && sol.clazz == class;
        detail.push_str(&format!("root {:.10} {:?}; ", sol.u, sol.clazz));
    }
    let alpha = sols.get(1).and_then(|s| s.alpha).unwrap_or(f64::NAN);
    ok &= (alpha - 2.0).abs() <= 1e-9;
    detail.push_str(&format!("alpha(0.5) = {alpha}"));
    report(1, "tent roots and classes", ok, &detail);
}

#[test]
fn c02_quartets() {
    let cases = [
        (Preset::Tent, [0.0, 0.0, 1.0, 1.0]),
        (Preset::Example56, [0.5, 1.0, 1.0, 1.0]),
        (Preset::Example58, [0.0, 1.0, 1.0, 1.0]),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (preset, want) in cases {
        let (m, p) = preset.build::<f64>();
        let q = quartet(&m, &p, 0.0, &SolveCfg::default()).unwrap();
        let got = [q.u_m, q.u_mrt, q.u_mlt, q.u_big_m];
        ok &= got.iter().zip(&want).all(|(g, w)| (g - w).abs() <= 1e-9);
        detail.push_str(&format!("{}: {:?}; ", preset.id(), got));
    }
    report(2, "extremal quartets", ok, &detail);
}

#[test]
fn c03_theta_solver() {
    // independent oracle: the fixed-point iteration t <- a*e^{-a}*e^{t}
    // contracts on (0,1) because its derivative there is t < 1
    let oracle = |a: f64| {
        let target = a * (-a).exp();
        let mut t = 0.5f64;
        for _ in 0..500 {
            t = target * t.exp();
        }
        t
    };
    let th2: f64 = theta_of(2.0).unwrap();
    let mut ok = (th2 - 0.4064).abs() <= 1e-3 && (th2 - oracle(2.0)).abs() <= 1e-9;
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let alpha = 1.0 + 9.0 * uniform(1301, 0, i) + 1e-9;
        let th: f64 = theta_of(alpha).unwrap();
        let resid = (th * (-th).exp() - alpha * (-alpha).exp()).abs();
        worst = worst.max(resid);
        ok &= resid <= 1e-12 && th > 0.0 && th < 1.0;
    }
    report(3, "theta solver", ok, &format!("theta(2) = {th2}, worst residual = {worst:.2e}"));
}

#[test]
fn c04_closed_forms_at_two() {
    let e: f64 = expected_count_limit(2.0).unwrap();
    let kc: f64 = kstar_crossing_limit(2.0).unwrap();
    let l: f64 = lower_bound_l(2.0).unwrap();
    // independent oracle for L(2) built on statrs' normal c.d.f.
    let a0 = 1.0f64 - 2.0 + 2.0f64.ln();
    let root = (2.0 * a0.abs()).sqrt();
    let phi = Normal::new(0.0, 1.0).unwrap().cdf(root);
    let l_oracle = (-2.0f64).exp() / (1.0 + 2.0 * (2.0 / a0.abs()).sqrt() * (1.0 - phi));
    let ok = (e - 0.13534).abs() <= 1e-5
        && (kc - 0.5936).abs() <= 1e-3
        && (l - 0.0642).abs() <= 5e-4
        && (l - l_oracle).abs() <= 1e-9
        && (normal_cdf(root) - phi).abs() <= 1e-10;
    report(
        4,
        "closed forms at alpha = 2",
        ok,
        &format!("expected_count = {e:.6}, kstar_limit = {kc:.6}, lower_L = {l:.6}"),
    );
}

/// Brute-force equilibrium sets straight from the defining condition.
fn brute_force_sets(values: &[f64], r: f64, c: f64) -> (Vec<i64>, Vec<i64>) {
    let n = values.len();
    let g = |k: i64| -> i64 {
        let th = r - c * k as f64 / n as f64;
        values.iter().filter(|&&y| y >= th).count() as i64
    };
    let mut k_set = Vec::new();
    let mut k_star = Vec::new();
    if g(0) == 0 {
        k_set.push(0);
        k_star.push(0);
    }
    for k in 1..=n as i64 {
        if g(k) == k {
            k_star.push(k);
            if g(k - 1) == k {
                k_set.push(k);
            }
        }
    }
    (k_set, k_star)
}

#[test]
fn c05_small_instance_oracle() {
    let presets = Preset::ALL;
    let mut ok = true;
    for trial in 0..10_000u64 {
        let preset = presets[(trial % 6) as usize];
        let (model, params) = preset.build::<f64>();
        let n = 2 + (uniform(5007, trial, 0) * 199.0) as usize;
        let pn = params.with_n(n).unwrap();
        let us = sample_uniforms(5008, trial, n);
        let sample = SignalSample::draw(&model, pn, 0.0, &us);
        let set = enumerate(&sample);
        let (bk, bks) = brute_force_sets(sample.values(), params.r, params.c);
        ok &= set.k == bk && set.k_star == bks;
        ok &= set.min() == stopgame::n_player::minimal_from(&sample, 0);
        ok &= set.max() == stopgame::n_player::maximal_from(&sample, 0);
        if !ok {
            report(5, "small-instance oracle", false, &format!("mismatch at trial {trial}"));
        }
    }
    report(5, "small-instance oracle", ok, "10000 samples, n <= 200, all presets");
}

#[test]
fn c06_double_fixed_point_suite() {
    let mut ok = true;
    for trial in 0..10_000u64 {
        let lo = (uniform(606, trial, 0) * 50.0) as i64;
        let width = 1 + (uniform(606, trial, 1) * 30.0) as i64;
        let hi = lo + width;
        // random nondecreasing map on {lo-1..hi}
        let mut f_vals = Vec::with_capacity((width + 2) as usize);
        let mut v = lo - 3 + (uniform(606, trial, 2) * 8.0) as i64;
        for j in 0..=(width + 1) {
            v += (uniform(606, trial, 10 + j as u64) * 3.0) as i64;
            f_vals.push(v);
        }
        let f = |k: i64| f_vals[(k - (lo - 1)) as usize];
        let got = double_fixed_point(f, lo, hi);
        // exhaustive oracle over the window
        let mut expect = None;
        if f(lo - 1) >= lo && f(hi) <= hi {
            for k in lo..=hi {
                if f(k) == k && f(k - 1) == k {
                    expect = Some(k);
                    break;
                }
            }
        }
        let agrees = match (&got, expect) {
            (Ok(k), Some(e)) => *k == e,
            (Err(_), None) => true,
            _ => false,
        };
        if !agrees {
            ok = false;
            report(6, "double fixed point suite", false, &format!("trial {trial}: {got:?} vs {expect:?}"));
        }
    }
    report(6, "double fixed point suite", ok, "10000 random monotone window maps");
}

#[test]
fn c07_two_atom_minimal_law() {
    let (m, _) = Preset::Example51.build::<f64>();
    let n = 2000;
    let samples = 4000;
    let cfg = ExperimentConfig::new("example-5.1", n, 1.0, 1.0, samples, 510);
    let rep = extremal_law(&m, &cfg);
    let p_one = rep
        .statistics
        .iter()
        .find(|s| s.name == "p_min_at_one")
        .unwrap()
        .estimate;
    let hist = &rep.histograms[0];
    let stray = hist
        .bins
        .iter()
        .filter(|b| b.k_over_n < 1.0 && (b.k_over_n - 0.5).abs() > 0.05)
        .map(|b| b.count)
        .sum::<u64>();
    let ok = (p_one - 0.5).abs() <= 0.03 && stray == 0;
    report(
        7,
        "two-atom minimal law",
        ok,
        &format!("P(min/n = 1) = {p_one:.4}, mass away from 1/2 = {stray}"),
    );
}

#[test]
fn c08_halfline_density_exactness() {
    let (m, params) = Preset::Example58.build::<f64>();
    let n = 5000usize;
    let pn = params.with_n(n).unwrap();
    let bad = (0..1000u64)
        .into_par_iter()
        .filter(|&s| {
            let us = sample_uniforms(58, s, n);
            let sample = SignalSample::draw(&m, pn, 0.0, &us);
            let set = enumerate(&sample);
            set.min() != 0 || set.max() != n as i64
        })
        .count();
    report(
        8,
        "support-below-r minimal 0 / maximal n",
        bad == 0,
        &format!("{bad} exceptions in 1000 samples at n = {n}"),
    );
}

#[test]
fn c09_tent_window_nonconvergence() {
    let (m, _) = Preset::Tent.build::<f64>();
    let mut cfg = ExperimentConfig::new("example-6.2", 10_000, 1.0, 1.0, 4000, 99);
    cfg.x = Some(0.5);
    cfg.eps = Some(0.02);
    let rep = estimate_near(&m, &cfg);
    let p = rep
        .statistics
        .iter()
        .find(|s| s.name == "p_window_nonempty")
        .unwrap()
        .estimate;
    let l: f64 = lower_bound_l(2.0).unwrap();
    let ok = (0.09..=0.145).contains(&p) && p >= l;
    report(
        9,
        "tent window-nonempty probability",
        ok,
        &format!("P = {p:.4}, lower bound L(2) = {l:.4}"),
    );
}

#[test]
fn c10_exact_formula_vs_monte_carlo() {
    let (m, _) = Preset::Uniform02.build::<f64>();
    let mut cfg = ExperimentConfig::new("uniform02", 100, 1.5, 1.0, 20_000, 1010);
    cfg.x = Some(0.5);
    cfg.eps = Some(0.1);
    let rep = estimate_near(&m, &cfg);
    let stat = rep
        .statistics
        .iter()
        .find(|s| s.name == "mean_window_count")
        .unwrap();
    let exact = stat.reference.unwrap();
    let dev = (stat.estimate - exact).abs();
    let mut ok = dev <= 3.0 * stat.std_error;

    let (tm, tp) = Preset::Tent.build::<f64>();
    let tp = tp.with_n(100_000).unwrap();
    let analytic = exact_expected_count(&tm, &tp, 0.0, 0.5, 0.01);
    ok &= (analytic - 0.13534).abs() <= 0.01;
    report(
        10,
        "exact formula vs Monte Carlo",
        ok,
        &format!(
            "MC {0:.5} vs exact {exact:.5} (se {1:.5}); tent n=1e5 sum = {analytic:.5}",
            stat.estimate, stat.std_error
        ),
    );
}

#[test]
fn c11_kstar_crossing_probability() {
    let (m, _) = Preset::Tent.build::<f64>();
    let mut cfg = ExperimentConfig::new("example-6.2", 50_000, 1.0, 1.0, 1000, 7);
    cfg.x = Some(0.5);
    cfg.eps = Some(0.01);
    cfg.set_selector = SetSelector::KStar;
    let rep = estimate_near(&m, &cfg);
    let p = rep
        .statistics
        .iter()
        .find(|s| s.name == "p_window_nonempty")
        .unwrap()
        .estimate;
    let ok = (p - 0.594).abs() <= 0.08;
    report(11, "relaxed-set crossing probability", ok, &format!("P = {p:.4} vs 0.594"));
}

#[test]
fn c12_tracking_construction() {
    let (m, params) = Preset::Uniform02.build::<f64>();
    let n = 10_000usize;
    let pn = params.with_n(n).unwrap();
    let grid = vec![0.0, 0.25, 0.5, 0.75];
    let flow = MfFlow64 {
        grid: grid.clone(),
        values: vec![0.5; grid.len()],
        kind: stopgame::mean_field::FlowKind::Custom,
    };
    let delta = 0.02;
    let outcomes: Vec<(bool, bool)> = (0..500u64)
        .into_par_iter()
        .map(|s| {
            let us = sample_uniforms(12, s, n);
            let res = track_flow(&m, &pn, &flow, delta, &us);
            let mut contract = true;
            for (&t, k) in res.grid.iter().zip(&res.counts) {
                if let Some(k) = *k {
                    let sample = SignalSample::draw(&m, pn, t, &us);
                    contract &= (0.5 - k as f64 / n as f64).abs() <= delta;
                    contract &= sample.count_g(k - 1) == k && sample.count_g(k) == k;
                }
            }
            (res.all_success(), contract)
        })
        .collect();
    let successes = outcomes.iter().filter(|(s, _)| *s).count();
    let contract_ok = outcomes.iter().all(|(_, c)| *c);
    let ok = successes * 10 >= 500 * 9 && contract_ok;
    report(
        12,
        "flow tracking",
        ok,
        &format!("all-times success on {successes}/500 runs, per-success contract: {contract_ok}"),
    );
}

#[test]
fn c13_scaling_window() {
    let (m, params) = Preset::Tent.build::<f64>();
    let n = 100_000usize;
    let pn = params.with_n(n).unwrap();
    let sqrt_n = (n as f64).sqrt();
    let mut ok = true;
    let mut detail = String::new();
    for beta in [0.5, 1.0, 2.0] {
        let exact = exact_expected_count(&m, &pn, 0.0, 0.5, beta / sqrt_n);
        let limit: f64 = window_expected_count(2.0, 0.5, beta).unwrap();
        ok &= (exact - limit).abs() <= 0.02;
        detail.push_str(&format!("beta {beta}: exact {exact:.5} vs limit {limit:.5}; "));
    }
    report(13, "scaling window", ok, &detail);
}

#[test]
fn c14_determinism_across_threads() {
    let (m, _) = Preset::Tent.build::<f64>();
    let mut cfg = ExperimentConfig::new("example-6.2", 2000, 1.0, 1.0, 400, 777);
    cfg.x = Some(0.5);
    cfg.eps = Some(0.02);
    let mut jsons = Vec::new();
    for threads in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let near = pool.install(|| estimate_near(&m, &cfg));
        let hist = pool.install(|| run_histogram(&m, &cfg));
        jsons.push((
            serde_json::to_string(&near).unwrap(),
            serde_json::to_string(&hist).unwrap(),
        ));
    }
    let ok = jsons.windows(2).all(|w| w[0] == w[1]);
    report(14, "thread-count determinism", ok, "1/2/4 worker reports bit-identical");
}

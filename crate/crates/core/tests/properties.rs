//! Randomized invariants across the model, solver, and game layers.

use proptest::prelude::*;
use stopgame::asymptotics::exact_prob_k_in_set;
use stopgame::mean_field::{find_solutions, flow, quartet, residual, FlowKind, MfClass, SolveCfg};
use stopgame::n_player::{enumerate, find_near, maximal_path, minimal_path, validate_path, SignalSample};
use stopgame::rng::sample_uniforms;
use stopgame::signal::{GameParams, Preset, SignalKind, SignalModel};

/// Random piecewise-constant density with a few pieces, plus game params.
fn arb_model() -> impl Strategy<Value = (SignalModel<f64>, GameParams<f64>)> {
    let gaps = prop::collection::vec(0.05f64..1.0, 2..6);
    (gaps, prop::collection::vec(0.01f64..1.0, 5), -0.5f64..1.5, 0.5f64..2.0).prop_map(
        |(gaps, raw_levels, r, c)| {
            let mut breakpoints = vec![-0.5f64];
            for g in &gaps {
                breakpoints.push(breakpoints.last().unwrap() + g);
            }
            let pieces = breakpoints.len() - 1;
            let levels: Vec<f64> = raw_levels[..pieces].to_vec();
            let total: f64 = breakpoints
                .windows(2)
                .zip(&levels)
                .map(|(w, l)| (w[1] - w[0]) * l)
                .sum();
            let levels: Vec<f64> = levels.iter().map(|l| l / total).collect();
            let model = SignalModel::new(SignalKind::PiecewiseDensity { breakpoints, levels })
                .unwrap()
                .with_default_horizon(1.0, r)
                .unwrap();
            (model, GameParams::new(r, c).unwrap())
        },
    )
}

proptest! {
    #[test]
    fn generalized_inverse_law((model, _) in arb_model(), ps in prop::collection::vec(0.0f64..=1.0, 20)) {
        for p in ps {
            let q = model.quantile_at(0.0, p);
            prop_assert!(model.cdf_at(0.0, q) >= p - 1e-12);
            // and the other direction on continuity points
            let y = model.quantile_at(0.0, p) + 1e-9;
            prop_assert!(model.quantile_at(0.0, model.cdf_at(0.0, y)) <= y + 1e-9);
        }
    }

    #[test]
    fn cdf_monotone_and_bounded((model, _) in arb_model(), ys in prop::collection::vec(-2.0f64..4.0, 20)) {
        let mut ys = ys;
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = 0.0;
        for y in ys {
            let f = model.cdf_at(0.0, y);
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f >= prev - 1e-15);
            prev = f;
        }
    }

    #[test]
    fn shift_translates_exactly((model, _) in arb_model(), eps in 0.0f64..0.5, ys in prop::collection::vec(-2.0f64..4.0, 10)) {
        let shifted = model.clone().with_shift(eps).unwrap();
        for y in ys {
            prop_assert_eq!(shifted.cdf_at(0.0, y), model.cdf_at(0.0, y - eps));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn quartet_ordering((model, params) in arb_model()) {
        let q = quartet(&model, &params, 0.0, &SolveCfg::default()).unwrap();
        prop_assert!(q.u_m <= q.u_mrt + 1e-12);
        prop_assert!(q.u_mlt <= q.u_big_m + 1e-12);
        prop_assert!(q.u_m <= q.u_big_m + 1e-12);
        prop_assert!((0.0..=1.0).contains(&q.u_m) && (0.0..=1.0).contains(&q.u_big_m));
        // every quartet entry is a root
        for u in [q.u_m, q.u_mrt, q.u_mlt, q.u_big_m] {
            prop_assert!(residual(&model, &params, 0.0, u).abs() <= 1e-6);
        }
    }
}

proptest! {
    #[test]
    fn extremal_roots_are_transversal((model, params) in arb_model()) {
        let sols = find_solutions(&model, &params, 0.0, &SolveCfg::default()).unwrap();
        prop_assert!(!sols.is_empty());
        let first = sols.first().unwrap();
        let last = sols.last().unwrap();
        // the residual is negative below 0 and positive above 1
        prop_assert!(first.left_transversal, "minimal root {} not left-transversal", first.u);
        prop_assert!(last.right_transversal, "maximal root {} not right-transversal", last.u);
    }

    #[test]
    fn counting_map_and_sets((model, params) in arb_model(), seed in 0u64..1_000_000, n in 2usize..120) {
        let pn = params.with_n(n).unwrap();
        let us = sample_uniforms(seed, 0, n);
        let sample = SignalSample::draw(&model, pn, 0.0, &us);
        let g = sample.g_table();
        prop_assert!(g.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(g.iter().all(|&v| (0..=n as i64).contains(&v)));
        let set = enumerate(&sample);
        prop_assert!(!set.k.is_empty());
        prop_assert!(set.k.iter().all(|k| set.k_star.contains(k)));
        for &k in &set.k {
            prop_assert!(set.min() <= k && k <= set.max());
        }
    }

    #[test]
    fn find_near_postcondition((model, params) in arb_model(), seed in 0u64..1_000_000, u in 0.0f64..=1.0, delta in 0.01f64..0.5) {
        let n = 80;
        let pn = params.with_n(n).unwrap();
        let us = sample_uniforms(seed, 1, n);
        let sample = SignalSample::draw(&model, pn, 0.0, &us);
        if let Ok(k) = find_near(&sample, u, delta) {
            let set = enumerate(&sample);
            prop_assert!(set.k.contains(&k), "k = {k} not in K = {:?}", set.k);
            prop_assert!((u - k as f64 / n as f64).abs() <= delta);
        }
    }

    #[test]
    fn paths_monotone_and_valid((model, params) in arb_model(), seed in 0u64..1_000_000) {
        let n = 60;
        let pn = params.with_n(n).unwrap();
        let us = sample_uniforms(seed, 2, n);
        let grid = [0.0, 0.3, 0.7, 1.0];
        for path in [minimal_path(&model, &pn, &grid, &us), maximal_path(&model, &pn, &grid, &us)] {
            prop_assert!(path.counts.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(validate_path(&model, &pn, &path, &us), "{:?} fails re-check", path.provenance);
        }
    }

    #[test]
    fn exact_probability_in_unit_interval((model, params) in arb_model(), n in 1usize..40, k in 0usize..40) {
        let k = k.min(n);
        let pn = params.with_n(n).unwrap();
        let p = exact_prob_k_in_set(&model, &pn, 0.0, k);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p), "p = {p}");
    }
}

#[test]
fn tangential_model_becomes_transversal_under_small_shift() {
    // scanning upward shifts of the signal law, some epsilon below 3/8
    // must turn every root of the gap model into a transversal one
    let (model, params) = Preset::Example56.build::<f64>();
    let found = (1..=100).any(|j| {
        let eps = 1e-3 * j as f64;
        let shifted = model.clone().with_shift(eps).unwrap();
        let sols = find_solutions(&shifted, &params, 0.0, &SolveCfg::default()).unwrap();
        !sols.is_empty()
            && sols.iter().all(|s| {
                matches!(
                    s.clazz,
                    MfClass::IncreasingTransversal | MfClass::DecreasingTransversal
                )
            })
    });
    assert!(found, "no shift in the scanned set removed the tangential root");
}

#[test]
fn empirical_cdf_close_to_model() {
    // Kolmogorov distance of 1e5 quantile-transformed uniforms
    for preset in Preset::ALL {
        let (model, _) = preset.build::<f64>();
        let n = 100_000;
        let us = sample_uniforms(424_242, 0, n);
        let mut ys = model.sample_signals(0.0, &us);
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, &y) in ys.iter().enumerate() {
            let f = model.cdf_at(0.0, y);
            let f_minus = model.cdf_at(0.0, y - 1e-9); // left limit at atoms
            // signed one-sided deviations; the suprema sit at sample points
            let up = (i + 1) as f64 / n as f64 - f;
            let down = f_minus - i as f64 / n as f64;
            ks = ks.max(up.max(down));
        }
        assert!(ks < 0.01, "{preset:?}: KS distance {ks}");
    }
}

#[test]
fn unique_root_is_increasing_transversal() {
    let (model, params) = Preset::Uniform02.build::<f64>();
    for t in [0.0, 0.25, 0.5, 0.75, 0.99] {
        let sols = find_solutions(&model, &params, t, &SolveCfg::default()).unwrap();
        assert_eq!(sols.len(), 1, "t = {t}");
        assert_eq!(sols[0].clazz, MfClass::IncreasingTransversal);
        assert!((sols[0].u - 0.5).abs() <= 1e-9);
    }
}

#[test]
fn minimal_flow_below_maximal_flow() {
    for preset in Preset::ALL {
        let (model, params) = preset.build::<f64>();
        let grid = [0.0, 0.2, 0.5, 0.8, 1.0];
        let lo = flow(&model, &params, FlowKind::Minimal, &grid, &SolveCfg::default()).unwrap();
        let hi = flow(&model, &params, FlowKind::Maximal, &grid, &SolveCfg::default()).unwrap();
        for (a, b) in lo.values.iter().zip(&hi.values) {
            assert!(a <= b, "{preset:?}");
        }
        assert!(lo.values.windows(2).all(|w| w[1] >= w[0]));
        assert!(hi.values.windows(2).all(|w| w[1] >= w[0]));
    }
}

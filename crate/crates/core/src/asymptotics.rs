//! Closed-form limit statistics and exact finite-n equilibrium
//! probabilities, used as analytic oracles by the Monte Carlo experiments.
//!
//! At a root `x` where the signal law has density, `alpha = c*f_t(r-c*x)`
//! controls the local behavior of the empirical counting process. For
//! `alpha > 1` the companion value `theta` in (0,1) solves
//! `theta*exp(-theta) = alpha*exp(-alpha)` and yields the limiting
//! probability `(1-theta)/(alpha-1)` that the relaxed equilibrium set
//! meets a shrinking window around `x`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{s, Real};
use crate::signal::{GameParams, SignalModel};

#[derive(Debug, Error, PartialEq)]
pub enum AsymError {
    #[error("outside the formula's domain: {0}")]
    Domain(String),
}

/// erf(x) by its alternating Taylor series; accurate for |x| <= 2.
fn erf_series<S: Real>(x: S) -> S {
    let two_over_sqrt_pi = s::<S>(1.128_379_167_095_512_6);
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1u32;
    loop {
        term = term * (-x2) / S::from_u32(n).unwrap();
        let add = term / S::from_u32(2 * n + 1).unwrap();
        sum += add;
        if add.abs() < s(1e-18) || n > 200 {
            break;
        }
        n += 1;
    }
    two_over_sqrt_pi * sum
}

/// erfc(x) for x > 2 via the continued fraction
/// `exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz algorithm.
fn erfc_cf<S: Real>(x: S) -> S {
    let tiny = s::<S>(1e-300);
    let mut f = x;
    let mut c = f;
    let mut d = S::zero();
    for i in 1..200u32 {
        let a = S::from_u32(i).unwrap() * s(0.5);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - S::one()).abs() < s(1e-17) {
            break;
        }
    }
    let sqrt_pi = s::<S>(1.772_453_850_905_516);
    (-x * x).exp() / (sqrt_pi * f)
}

fn erfc<S: Real>(x: S) -> S {
    if x < S::zero() {
        s::<S>(2.0) - erfc(-x)
    } else if x <= s(2.0) {
        S::one() - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

/// Standard normal c.d.f., absolute error below 1e-10.
pub fn normal_cdf<S: Real>(z: S) -> S {
    let half = s::<S>(0.5);
    half * erfc(-z / s::<S>(std::f64::consts::SQRT_2))
}

/// ln Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma<S: Real>(x: S) -> S {
    const COEF: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    let base = s::<S>(0.999_999_999_999_809_93);
    if x < s(0.5) {
        // reflection keeps the approximation in its accurate range
        let pi = s::<S>(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(S::one() - x);
    }
    let x = x - S::one();
    let mut a = base;
    for (i, &c) in COEF.iter().enumerate() {
        a += s::<S>(c) / (x + S::from_usize(i + 1).unwrap());
    }
    let t = x + s(7.5);
    let half = s::<S>(0.5);
    let ln_sqrt_2pi = s::<S>(0.918_938_533_204_672_7);
    ln_sqrt_2pi + (x + half) * t.ln() - t + a.ln()
}

fn ln_choose<S: Real>(n: usize, k: usize) -> S {
    let nf = S::from_usize(n).unwrap();
    let kf = S::from_usize(k).unwrap();
    ln_gamma(nf + S::one()) - ln_gamma(kf + S::one()) - ln_gamma(nf - kf + S::one())
}

/// Companion of `alpha > 1`: the root `theta` in (0,1) of
/// `theta*exp(-theta) = alpha*exp(-alpha)`, by bisection on the
/// increasing map `t -> t*exp(-t)`.
pub fn theta_of<S: Real>(alpha: S) -> Result<S, AsymError> {
    if !(alpha > S::one()) {
        return Err(AsymError::Domain(format!("theta_of needs alpha > 1, got {alpha}")));
    }
    let target = alpha * (-alpha).exp();
    let mut lo = S::zero();
    let mut hi = S::one() - s(1e-15);
    for _ in 0..200 {
        let mid = (lo + hi) * s(0.5);
        if mid * (-mid).exp() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * s(0.5))
}

/// Limiting probability that the relaxed set K* meets a shrinking window
/// around a root with local slope `alpha > 1`: `(1-theta)/(alpha-1)`.
pub fn kstar_crossing_limit<S: Real>(alpha: S) -> Result<S, AsymError> {
    let theta = theta_of(alpha)?;
    Ok((S::one() - theta) / (alpha - S::one()))
}

/// Limiting expected number of equilibrium counts in a shrinking window:
/// `exp(-alpha)/|1-alpha|`, defined for `alpha >= 0`, `alpha != 1`.
pub fn expected_count_limit<S: Real>(alpha: S) -> Result<S, AsymError> {
    if alpha < S::zero() || alpha == S::one() {
        return Err(AsymError::Domain(format!(
            "expected_count_limit needs alpha >= 0, alpha != 1, got {alpha}"
        )));
    }
    Ok((-alpha).exp() / (S::one() - alpha).abs())
}

/// Closed-form lower bound on the limiting window-nonempty probability for
/// `alpha > 1`, with `a0 = 1 - alpha + ln(alpha)`:
/// `exp(-alpha) / ((alpha-1)(1 + 2*sqrt(2/|a0|)*(1 - Phi(sqrt(2|a0|)))))`.
pub fn lower_bound_l<S: Real>(alpha: S) -> Result<S, AsymError> {
    if !(alpha > S::one()) {
        return Err(AsymError::Domain(format!("lower_bound_l needs alpha > 1, got {alpha}")));
    }
    let a0 = S::one() - alpha + alpha.ln();
    let two = s::<S>(2.0);
    let root = (two * a0.abs()).sqrt();
    let tail = S::one() - normal_cdf(root);
    let denom = (alpha - S::one()) * (S::one() + two * (two / a0.abs()).sqrt() * tail);
    Ok((-alpha).exp() / denom)
}

/// Expected count in a window of half-width `beta/sqrt(n)` around `x`,
/// in the large-n limit: `expected_count_limit * (Phi(q) - Phi(-q))` with
/// `q = |alpha-1| * beta / sqrt(x(1-x))`.
pub fn window_expected_count<S: Real>(alpha: S, x: S, beta: S) -> Result<S, AsymError> {
    if !(x > S::zero() && x < S::one()) {
        return Err(AsymError::Domain(format!("x must lie in (0,1), got {x}")));
    }
    if beta < S::zero() {
        return Err(AsymError::Domain(format!("beta must be >= 0, got {beta}")));
    }
    let limit = expected_count_limit(alpha)?;
    let q = (alpha - S::one()).abs() * beta / (x * (S::one() - x)).sqrt();
    Ok(limit * (normal_cdf(q) - normal_cdf(-q)))
}

/// Exact probability that count `k` is an equilibrium of an i.i.d. sample:
/// `C(n,k) * F_k^{n-k} * (1-F_{k-1})^k` with `F_j = F_t(r - c*j/n)`;
/// `k = 0` gives `F_t(r)^n`. Evaluated in the log domain.
pub fn exact_prob_k_in_set<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    k: usize,
) -> S {
    let n = params.n();
    assert!(k <= n);
    let nf = S::from_usize(n).unwrap();
    let f_at = |j: usize| {
        model.cdf_at(t, params.r - params.c * S::from_usize(j).unwrap() / nf)
    };
    if k == 0 {
        return model.cdf_at(t, params.r).powi(n as i32);
    }
    let fk = f_at(k);
    let sk = S::one() - f_at(k - 1);
    if (n > k && fk <= S::zero()) || sk <= S::zero() {
        return S::zero();
    }
    let mut ln_p = ln_choose::<S>(n, k) + S::from_usize(k).unwrap() * sk.ln();
    if n > k {
        ln_p += S::from_usize(n - k).unwrap() * fk.ln();
    }
    ln_p.exp()
}

/// Sum of `exact_prob_k_in_set` over all counts with `|x - k/n| < eps`.
pub fn exact_expected_count<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    x: S,
    eps: S,
) -> S {
    assert!(eps > S::zero());
    let n = params.n();
    let nf = S::from_usize(n).unwrap();
    let lo = ((x - eps) * nf).ceil().max(S::zero()).to_usize().unwrap_or(0);
    let hi = ((x + eps) * nf).floor().min(nf).to_usize().unwrap_or(0);
    let mut total = S::zero();
    for k in lo..=hi.min(n) {
        let kf = S::from_usize(k).unwrap();
        if (x - kf / nf).abs() < eps {
            total += exact_prob_k_in_set(model, params, t, k);
        }
    }
    total
}

/// Bundle of the closed-form statistics at one `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaStats<S> {
    pub alpha: S,
    pub a0: S,
    pub theta: Option<S>,
    pub kstar_crossing_limit: Option<S>,
    pub expected_count_limit: Option<S>,
    pub lower_bound_l: Option<S>,
}

impl<S: Real> AlphaStats<S> {
    pub fn new(alpha: S) -> Self {
        Self {
            alpha,
            a0: S::one() - alpha + alpha.ln(),
            theta: theta_of(alpha).ok(),
            kstar_crossing_limit: kstar_crossing_limit(alpha).ok(),
            expected_count_limit: expected_count_limit(alpha).ok(),
            lower_bound_l: lower_bound_l(alpha).ok(),
        }
    }
}

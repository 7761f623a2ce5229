//! Exact equilibrium computation for the n-player game.
//!
//! For a realized cross-section of signals, `G(k)` counts the agents
//! whose signal meets the threshold `r - c*k/n` once `k` have stopped.
//! A count `k` is an equilibrium when `G(k-1) = G(k) = k` (with the
//! convention that zero stopped agents only require `G(0) = 0`). This
//! module enumerates those counts, runs the minimal/maximal fixed-point
//! constructions, searches for equilibria near a target fraction, and
//! assembles dynamic equilibrium paths on a time grid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mean_field::MfFlow;
use crate::scalar::Real;
use crate::signal::{GameParams, SignalModel};

#[derive(Debug, Error, PartialEq)]
pub enum NpError {
    #[error("no equilibrium found in the requested window")]
    NotFound,
    #[error("splice junction decreases the stopped count")]
    OrderViolation,
}

/// One sorted cross-section of n signals at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSample<S> {
    values: Vec<S>,
    pub params: GameParams<S>,
    pub t: S,
}

impl<S: Real> SignalSample<S> {
    pub fn new(mut values: Vec<S>, params: GameParams<S>, t: S) -> Self {
        assert_eq!(values.len(), params.n(), "sample length must equal n");
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self { values, params, t }
    }

    /// Draw the sample from a model via the quantile transform.
    pub fn draw(model: &SignalModel<S>, params: GameParams<S>, t: S, uniforms: &[S]) -> Self {
        Self::new(model.sample_signals(t, uniforms), params, t)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// `G(k) = #{i: Y^i >= r - c*k/n}`; `k = -1` is read as `G(0)`.
    pub fn count_g(&self, k: i64) -> i64 {
        let k = k.max(0);
        let n = self.n();
        let th = self.params.r
            - self.params.c * S::from_i64(k).unwrap() / S::from_usize(n).unwrap();
        let below = self.values.partition_point(|&y| y < th);
        (n - below) as i64
    }

    /// `G(k)` for every `k` in `0..=n`, via one two-pointer sweep.
    pub fn g_table(&self) -> Vec<i64> {
        let n = self.n();
        let cn = S::from_usize(n).unwrap();
        let mut table = Vec::with_capacity(n + 1);
        let mut p = n; // first index with value >= threshold
        for k in 0..=n {
            let th = self.params.r - self.params.c * S::from_usize(k).unwrap() / cn;
            while p > 0 && self.values[p - 1] >= th {
                p -= 1;
            }
            // threshold decreases with k, so p only moves left
            table.push((n - p) as i64);
        }
        table
    }
}

/// The equilibrium count sets of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    /// Counts with `G(k-1) = G(k) = k` (`0` included iff `G(0) = 0`).
    pub k: Vec<i64>,
    /// Counts with `G(k) = k` only, same zero rule.
    pub k_star: Vec<i64>,
    pub n: usize,
}

impl EquilibriumSet {
    pub fn min(&self) -> i64 {
        *self.k.first().expect("K is never empty")
    }

    pub fn max(&self) -> i64 {
        *self.k.last().expect("K is never empty")
    }
}

/// All equilibrium counts of the sample, in one pass over the G table.
pub fn enumerate<S: Real>(sample: &SignalSample<S>) -> EquilibriumSet {
    let g = sample.g_table();
    let n = sample.n();
    let mut k = Vec::new();
    let mut k_star = Vec::new();
    if g[0] == 0 {
        k.push(0);
        k_star.push(0);
    }
    for j in 1..=n {
        if g[j] == j as i64 {
            k_star.push(j as i64);
            if g[j - 1] == j as i64 {
                k.push(j as i64);
            }
        }
    }
    EquilibriumSet { k, k_star, n }
}

/// Least fixed point of `k -> max(k0, G(k))` starting from `k0`: the
/// minimal equilibrium count given `k0` agents already stopped.
pub fn minimal_from<S: Real>(sample: &SignalSample<S>, k0: i64) -> i64 {
    let mut k = k0;
    loop {
        let next = k0.max(sample.count_g(k));
        if next == k {
            return k;
        }
        k = next;
    }
}

/// Greedy group coordination: the largest group that can stop together on
/// top of `k0`. Equals `max(K)` when `k0 = 0`.
pub fn maximal_from<S: Real>(sample: &SignalSample<S>, k0: i64) -> i64 {
    // the greedy step picks the largest l with G(k + l - 1) >= k + l, which
    // lands directly on the largest j >= k0 with G(j) >= j + 1
    let g = sample.g_table();
    let n = sample.n() as i64;
    let mut best = k0;
    for j in (k0.max(0)..n).rev() {
        if g[j as usize] >= j + 1 {
            best = j + 1;
            break;
        }
    }
    best
}

/// Minimal `k` in `{lo..hi}` with `f(k-1) = f(k) = k`, for a map that is
/// nondecreasing on `{lo-1..hi}`. Exists whenever `f(lo-1) >= lo` and
/// `f(hi) <= hi` (the map then sends the window into itself); otherwise
/// `NotFound`.
pub fn double_fixed_point<F: Fn(i64) -> i64>(f: F, lo: i64, hi: i64) -> Result<i64, NpError> {
    if lo > hi || f(lo - 1) < lo || f(hi) > hi {
        return Err(NpError::NotFound);
    }
    for k in lo..=hi {
        if f(k) == k {
            debug_assert_eq!(f(k - 1), k, "minimal fixed point misses the double condition");
            return Ok(k);
        }
    }
    // monotone self-maps of a finite interval always have a fixed point
    unreachable!("monotone window map without fixed point")
}

/// Equilibrium count `k` with `|u - k/n| <= delta`, when the sample admits
/// one in the window around `u`. The window is `[u - 0.9*delta, u + 0.9*delta]`
/// and success requires the bracketing event `G(lo-1) >= lo`, `G(hi) <= hi`
/// on its integer endpoints; `NotFound` is a legitimate outcome whose
/// frequency vanishes for large n at increasing-transversal targets.
pub fn find_near<S: Real>(sample: &SignalSample<S>, u: S, delta: S) -> Result<i64, NpError> {
    let n = sample.n() as i64;
    let nf = S::from_i64(n).unwrap();
    let gap = delta / S::from_i64(10).unwrap();
    let u0 = u - delta + gap;
    let u1 = u + delta - gap;
    // round inward so k/n stays within delta of u even when 1/n exceeds gap
    let lo = (nf * u0).ceil().to_i64().unwrap_or(0).clamp(0, n);
    let hi = (nf * u1).floor().to_i64().unwrap_or(0).clamp(0, n);
    let k = double_fixed_point(|j| sample.count_g(j), lo, hi)?;
    let dist = (u - S::from_i64(k).unwrap() / nf).abs();
    debug_assert!(dist <= delta, "window arithmetic kept k within delta");
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Minimal,
    Maximal,
    Spliced,
    Tracked,
}

/// Equilibrium counts along a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPath<S> {
    pub grid: Vec<S>,
    pub counts: Vec<i64>,
    pub provenance: Provenance,
}

fn extremal_path<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    grid: &[S],
    uniforms: &[S],
    minimal: bool,
) -> EquilibriumPath<S> {
    assert!(grid.windows(2).all(|w| w[0] < w[1]), "grid must be strictly increasing");
    let mut counts = Vec::with_capacity(grid.len());
    let mut k = 0;
    for &t in grid {
        let sample = SignalSample::draw(model, *params, t, uniforms);
        k = if minimal { minimal_from(&sample, k) } else { maximal_from(&sample, k) };
        counts.push(k);
    }
    EquilibriumPath {
        grid: grid.to_vec(),
        counts,
        provenance: if minimal { Provenance::Minimal } else { Provenance::Maximal },
    }
}

/// Forced-stopping iteration at each grid time, seeded by the previous count.
pub fn minimal_path<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    grid: &[S],
    uniforms: &[S],
) -> EquilibriumPath<S> {
    extremal_path(model, params, grid, uniforms, true)
}

/// Group coordination at each grid time, seeded by the previous count.
pub fn maximal_path<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    grid: &[S],
    uniforms: &[S],
) -> EquilibriumPath<S> {
    extremal_path(model, params, grid, uniforms, false)
}

/// Follow `path_a` before `t0`, extend minimally on `[t0, t1)`, then jump
/// to `path_b` from `t1` on. Both paths must live on the same grid and the
/// junction may not decrease the stopped count.
pub fn splice<S: Real>(
    path_a: &EquilibriumPath<S>,
    path_b: &EquilibriumPath<S>,
    t0: S,
    t1: S,
    model: &SignalModel<S>,
    params: &GameParams<S>,
    uniforms: &[S],
) -> Result<EquilibriumPath<S>, NpError> {
    assert_eq!(path_a.grid, path_b.grid, "splice needs a common grid");
    assert!(t0 <= t1);
    let grid = &path_a.grid;
    let i0 = grid.iter().position(|&t| t == t0).expect("t0 must be a grid point");
    let i1 = grid.iter().position(|&t| t == t1).expect("t1 must be a grid point");
    if path_a.counts[i0] > path_b.counts[i1] {
        return Err(NpError::OrderViolation);
    }
    let mut counts = Vec::with_capacity(grid.len());
    counts.extend_from_slice(&path_a.counts[..i0]);
    let mut k = if i0 > 0 { path_a.counts[i0 - 1] } else { 0 };
    for j in i0..i1 {
        let sample = SignalSample::draw(model, *params, grid[j], uniforms);
        k = minimal_from(&sample, k);
        counts.push(k);
    }
    counts.extend_from_slice(&path_b.counts[i1..]);
    if counts.windows(2).any(|w| w[1] < w[0]) {
        return Err(NpError::OrderViolation);
    }
    Ok(EquilibriumPath { grid: grid.clone(), counts, provenance: Provenance::Spliced })
}

/// Per-time outcome of following a mean field flow with `find_near`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackResult<S> {
    pub grid: Vec<S>,
    /// Count at each grid time; `None` where the bracketing event failed.
    pub counts: Vec<Option<i64>>,
}

impl<S> TrackResult<S> {
    pub fn all_success(&self) -> bool {
        self.counts.iter().all(Option::is_some)
    }

    /// Assembled path; only meaningful when every time succeeded.
    pub fn into_path(self) -> Option<EquilibriumPath<S>> {
        let counts: Option<Vec<i64>> = self.counts.into_iter().collect();
        Some(EquilibriumPath { grid: self.grid, counts: counts?, provenance: Provenance::Tracked })
    }
}

/// At each grid time, search for an equilibrium count within `delta` of the
/// flow value. Equal flow values get identical windows, and pointwise
/// increasing signals push the minimal double fixed point upward, so the
/// successful counts are nondecreasing.
pub fn track_flow<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    flow: &MfFlow<S>,
    delta: S,
    uniforms: &[S],
) -> TrackResult<S> {
    let counts = flow
        .grid
        .iter()
        .zip(&flow.values)
        .map(|(&t, &u)| {
            let sample = SignalSample::draw(model, *params, t, uniforms);
            find_near(&sample, u, delta).ok()
        })
        .collect();
    TrackResult { grid: flow.grid.clone(), counts }
}

/// Re-check a path: counts nondecreasing and each one an equilibrium count
/// of its time's cross-section. The full per-time condition is equivalent
/// to the conditional one here because signals only increase, so agents
/// stopped at a jump time keep meeting the threshold that justified the jump.
pub fn validate_path<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    path: &EquilibriumPath<S>,
    uniforms: &[S],
) -> bool {
    if path.counts.windows(2).any(|w| w[1] < w[0]) {
        return false;
    }
    path.grid.iter().zip(&path.counts).all(|(&t, &k)| {
        let sample = SignalSample::draw(model, *params, t, uniforms);
        if k == 0 {
            sample.count_g(0) == 0
        } else {
            sample.count_g(k - 1) == k && sample.count_g(k) == k
        }
    })
}

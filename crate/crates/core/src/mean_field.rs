//! Mean field equilibria.
//!
//! A population fraction `u` is an equilibrium at time `t` when
//! `g_t(u) = u + F_t(r - c*u) - 1` vanishes. This module locates all
//! roots of `g_t` in `[0, 1]`, classifies how `g_t` crosses zero at each
//! of them, extracts the extremal quartet, and assembles time-indexed
//! equilibrium flows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{s, Real};
use crate::signal::{GameParams, SignalModel};

#[derive(Debug, Error, PartialEq)]
pub enum MfError {
    /// Two sign changes hidden inside one scan cell; increase `scan_points`.
    #[error("scan too coarse near u = {0}")]
    ScanTooCoarse(f64),
    #[error("residual at u = {0} is {1}, not a root at the given tolerance")]
    NotARoot(f64, f64),
}

/// How the residual crosses (or touches) zero at a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MfClass {
    IncreasingTransversal,
    DecreasingTransversal,
    TangentialAbove,
    TangentialBelow,
    FlatSegment,
}

/// One classified root of the residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfSolution<S> {
    pub u: S,
    /// Some probe to the left has residual < 0.
    pub left_transversal: bool,
    /// Some probe to the right has residual > 0.
    pub right_transversal: bool,
    pub clazz: MfClass,
    /// `c * f_t(r - c*u)` when the model has a density there.
    pub alpha: Option<S>,
    /// Interval of roots for flat clusters; `u` is its left endpoint.
    pub segment: Option<(S, S)>,
}

/// Extremal roots: minimal, minimal right-transversal, maximal
/// left-transversal, maximal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfQuartet<S> {
    pub u_m: S,
    pub u_mrt: S,
    pub u_mlt: S,
    pub u_big_m: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Minimal,
    Maximal,
    Custom,
}

/// Time-indexed equilibrium path `t_j -> rho(t_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfFlow<S> {
    pub grid: Vec<S>,
    pub values: Vec<S>,
    pub kind: FlowKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowReport<S> {
    pub max_residual: S,
    pub monotone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveCfg<S> {
    pub scan_points: usize,
    pub tol: S,
}

impl<S: Real> Default for SolveCfg<S> {
    fn default() -> Self {
        Self { scan_points: 4096, tol: s(1e-9) }
    }
}

/// Residual `g_t(u) = u + F_t(r - c*u) - 1`, defined for all real `u`;
/// it is < 0 for u < 0 and > 0 for u > 1 since F stays in [0, 1].
pub fn residual<S: Real>(model: &SignalModel<S>, params: &GameParams<S>, t: S, u: S) -> S {
    u + model.cdf_at(t, params.r - params.c * u) - S::one()
}

/// Classification probe offsets: 1e-3 down to 1e-9, geometrically spaced.
fn probe_offsets<S: Real>() -> [S; 7] {
    [s(1e-3), s(1e-4), s(1e-5), s(1e-6), s(1e-7), s(1e-8), s(1e-9)]
}

struct ProbeSigns {
    left_neg: bool,
    left_pos: bool,
    right_neg: bool,
    right_pos: bool,
}

fn probe<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    lo: S,
    hi: S,
) -> ProbeSigns {
    let mut signs =
        ProbeSigns { left_neg: false, left_pos: false, right_neg: false, right_pos: false };
    for d in probe_offsets::<S>() {
        let gl = residual(model, params, t, lo - d);
        let gr = residual(model, params, t, hi + d);
        signs.left_neg |= gl < S::zero();
        signs.left_pos |= gl > S::zero();
        signs.right_neg |= gr < S::zero();
        signs.right_pos |= gr > S::zero();
    }
    signs
}

fn class_of(signs: &ProbeSigns) -> MfClass {
    if signs.left_neg && signs.right_pos {
        MfClass::IncreasingTransversal
    } else if signs.left_pos && signs.right_neg {
        MfClass::DecreasingTransversal
    } else if signs.left_pos || signs.right_pos {
        MfClass::TangentialAbove
    } else {
        MfClass::TangentialBelow
    }
}

fn alpha_at<S: Real>(model: &SignalModel<S>, params: &GameParams<S>, t: S, u: S) -> Option<S> {
    model.density_at(t, params.r - params.c * u).map(|f| params.c * f)
}

/// Classify a known root `u`; errors if `|g_t(u)|` exceeds the tolerance.
pub fn classify<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    u: S,
    tol: S,
) -> Result<MfSolution<S>, MfError> {
    let g = residual(model, params, t, u);
    if g.abs() > tol {
        return Err(MfError::NotARoot(
            u.to_f64().unwrap_or(f64::NAN),
            g.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let signs = probe(model, params, t, u, u);
    Ok(MfSolution {
        u,
        left_transversal: signs.left_neg,
        right_transversal: signs.right_pos,
        clazz: class_of(&signs),
        alpha: alpha_at(model, params, t, u),
        segment: None,
    })
}

/// Scan nodes: a uniform grid on [0,1] joined with every model breakpoint
/// mapped through `u = (r - y)/c`, so piecewise-linear c.d.f.s make every
/// sign change land between adjacent nodes exactly.
fn scan_nodes<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    scan_points: usize,
) -> Vec<S> {
    let m = scan_points.max(2);
    let mut nodes: Vec<S> = (0..m)
        .map(|i| s::<S>(i as f64) / s::<S>((m - 1) as f64))
        .collect();
    for y in model.breakpoints_at(t) {
        let u = (params.r - y) / params.c;
        if u > S::zero() && u < S::one() {
            nodes.push(u);
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup_by(|a, b| (*a - *b).abs() < s(1e-15));
    nodes
}

fn bisect_sign_change<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    mut a: S,
    mut b: S,
    ga: S,
    tol: S,
) -> S {
    let mut sign_a = ga > S::zero();
    for _ in 0..200 {
        if (b - a).abs() <= tol * s(0.25) {
            break;
        }
        let mid = (a + b) * s(0.5);
        let gm = residual(model, params, t, mid);
        if gm == S::zero() {
            return mid;
        }
        if (gm > S::zero()) == sign_a {
            a = mid;
            sign_a = gm > S::zero();
        } else {
            b = mid;
        }
    }
    (a + b) * s(0.5)
}

/// Push the boundary of a near-zero region from `outside` (where |g| > tol)
/// toward `inside` (where |g| <= tol).
fn bisect_flat_edge<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    mut outside: S,
    mut inside: S,
    tol: S,
) -> S {
    for _ in 0..200 {
        if (inside - outside).abs() <= tol * s(0.25) {
            break;
        }
        let mid = (outside + inside) * s(0.5);
        if residual(model, params, t, mid).abs() <= tol {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// All roots of the residual in [0, 1], flat clusters merged into segments.
pub fn find_solutions<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    cfg: &SolveCfg<S>,
) -> Result<Vec<MfSolution<S>>, MfError> {
    let tol = cfg.tol;
    let nodes = scan_nodes(model, params, t, cfg.scan_points);
    let vals: Vec<S> = nodes.iter().map(|&u| residual(model, params, t, u)).collect();
    let near_zero: Vec<bool> = vals.iter().map(|g| g.abs() <= tol).collect();

    // Group near-zero nodes into flat runs; adjacent zero nodes belong to the
    // same run only if the residual also vanishes midway between them.
    let mut runs: Vec<(usize, usize)> = Vec::new(); // inclusive node index ranges
    let mut i = 0;
    while i < nodes.len() {
        if !near_zero[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < nodes.len() && near_zero[i + 1] {
            let mid = (nodes[i] + nodes[i + 1]) * s(0.5);
            if residual(model, params, t, mid).abs() > tol {
                break;
            }
            i += 1;
        }
        runs.push((start, i));
        i += 1;
    }

    let mut point_roots: Vec<S> = Vec::new();
    let mut segments: Vec<(S, S)> = Vec::new();
    for &(a, b) in &runs {
        if a == b {
            point_roots.push(nodes[a]);
        } else {
            let lo = if a == 0 {
                nodes[0]
            } else {
                bisect_flat_edge(model, params, t, nodes[a - 1], nodes[a], tol)
            };
            let hi = if b + 1 == nodes.len() {
                nodes[b]
            } else {
                bisect_flat_edge(model, params, t, nodes[b + 1], nodes[b], tol)
            };
            segments.push((lo, hi));
        }
    }

    // Sign changes between consecutive nodes that are both away from zero.
    for w in 0..nodes.len() - 1 {
        if near_zero[w] || near_zero[w + 1] {
            continue;
        }
        let (ga, gb) = (vals[w], vals[w + 1]);
        if (ga > S::zero()) != (gb > S::zero()) {
            point_roots.push(bisect_sign_change(
                model, params, t, nodes[w], nodes[w + 1], ga, tol,
            ));
        } else {
            // same-sign cell: a hidden pair of roots shows up at the midpoint
            let mid = (nodes[w] + nodes[w + 1]) * s(0.5);
            let gm = residual(model, params, t, mid);
            if gm.abs() > tol && (gm > S::zero()) != (ga > S::zero()) {
                return Err(MfError::ScanTooCoarse(mid.to_f64().unwrap_or(f64::NAN)));
            }
        }
    }

    point_roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    point_roots.dedup_by(|a, b| (*a - *b).abs() <= tol * s(50.0));
    // drop point roots swallowed by a segment
    point_roots.retain(|&u| {
        !segments.iter().any(|&(lo, hi)| u >= lo - tol && u <= hi + tol)
    });

    let mut out: Vec<MfSolution<S>> = Vec::new();
    for u in point_roots {
        out.push(classify(model, params, t, u, tol.max(residual(model, params, t, u).abs()))?);
    }
    for (lo, hi) in segments {
        let signs = probe(model, params, t, lo, hi);
        out.push(MfSolution {
            u: lo,
            left_transversal: signs.left_neg,
            right_transversal: signs.right_pos,
            clazz: MfClass::FlatSegment,
            alpha: None,
            segment: Some((lo, hi)),
        });
    }
    out.sort_by(|a, b| a.u.partial_cmp(&b.u).unwrap());
    Ok(out)
}

/// Extremal quartet at time `t`. Roots always exist since the residual is
/// negative below 0 and positive above 1.
pub fn quartet<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    t: S,
    cfg: &SolveCfg<S>,
) -> Result<MfQuartet<S>, MfError> {
    let sols = find_solutions(model, params, t, cfg)?;
    // candidate points: (u, left flag, right flag); a flat segment offers its
    // two endpoints, transversal only on the outward-facing side
    let mut cands: Vec<(S, bool, bool)> = Vec::new();
    for sol in &sols {
        match sol.segment {
            Some((lo, hi)) => {
                cands.push((lo, sol.left_transversal, false));
                cands.push((hi, false, sol.right_transversal));
            }
            None => cands.push((sol.u, sol.left_transversal, sol.right_transversal)),
        }
    }
    debug_assert!(!cands.is_empty());
    let u_m = cands.iter().map(|c| c.0).fold(S::infinity(), S::min);
    let u_big_m = cands.iter().map(|c| c.0).fold(S::neg_infinity(), S::max);
    let u_mrt = cands
        .iter()
        .filter(|c| c.2)
        .map(|c| c.0)
        .fold(S::infinity(), S::min);
    let u_mlt = cands
        .iter()
        .filter(|c| c.1)
        .map(|c| c.0)
        .fold(S::neg_infinity(), S::max);
    // the maximal root is right-transversal and the minimal one
    // left-transversal, so the filtered sets are nonempty
    let u_mrt = if u_mrt.is_finite() { u_mrt } else { u_big_m };
    let u_mlt = if u_mlt.is_finite() { u_mlt } else { u_m };
    Ok(MfQuartet { u_m, u_mrt, u_mlt, u_big_m })
}

/// Extremal flow on a time grid: per-time minimal or maximal root, made
/// nondecreasing by running maximum (the right-continuous regularization
/// at grid level).
pub fn flow<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    kind: FlowKind,
    grid: &[S],
    cfg: &SolveCfg<S>,
) -> Result<MfFlow<S>, MfError> {
    assert!(
        grid.windows(2).all(|w| w[0] < w[1]),
        "flow grid must be strictly increasing"
    );
    let mut values = Vec::with_capacity(grid.len());
    let mut running = S::neg_infinity();
    for &t in grid {
        let q = quartet(model, params, t, cfg)?;
        let v = match kind {
            FlowKind::Minimal => q.u_m,
            FlowKind::Maximal => q.u_big_m,
            FlowKind::Custom => q.u_m,
        };
        debug_assert!(
            v >= running - cfg.tol,
            "extremal root decreased along the grid"
        );
        running = running.max(v);
        values.push(running);
    }
    Ok(MfFlow { grid: grid.to_vec(), values, kind })
}

/// Re-evaluate a flow: worst per-time residual and monotonicity.
pub fn verify_flow<S: Real>(
    model: &SignalModel<S>,
    params: &GameParams<S>,
    flow: &MfFlow<S>,
) -> FlowReport<S> {
    let max_residual = flow
        .grid
        .iter()
        .zip(&flow.values)
        .map(|(&t, &v)| residual(model, params, t, v).abs())
        .fold(S::zero(), S::max);
    let monotone = flow.values.windows(2).all(|w| w[1] >= w[0]);
    FlowReport { max_residual, monotone }
}

//! Laws of the i.i.d. agent signals.
//!
//! A [`SignalModel`] describes the common distribution of the signals
//! `Y_t` at every time `t`: before the horizon the law is constant in
//! time, at and after the horizon the signal jumps to `post_value`
//! (which forces everyone to stop once it exceeds the rate threshold).
//! Signal paths are coupled comonotonically: one uniform per agent,
//! transformed through the time-`t` quantile function, which makes the
//! paths increasing in time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{s, Real};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
}

/// Game constants shared by the n-player and mean field formulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams<S> {
    /// Interest-rate threshold.
    pub r: S,
    /// Interaction constant, strictly positive.
    pub c: S,
    /// Player count; absent for mean-field uses.
    pub n: Option<usize>,
}

impl<S: Real> GameParams<S> {
    pub fn new(r: S, c: S) -> Result<Self, ModelError> {
        if !(c > S::zero()) {
            return Err(ModelError::Invalid("interaction constant c must be > 0".into()));
        }
        Ok(Self { r, c, n: None })
    }

    pub fn with_n(mut self, n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::Invalid("player count n must be >= 1".into()));
        }
        self.n = Some(n);
        Ok(self)
    }

    /// Player count, panicking if the params were built for mean-field use.
    pub fn n(&self) -> usize {
        self.n.expect("GameParams used in an n-player context must carry n")
    }
}

/// Shape of the signal law at a fixed time (before the horizon).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SignalKind<S> {
    /// Two point masses.
    TwoAtom { locations: [S; 2], weights: [S; 2] },
    /// Piecewise-constant density: `levels[i]` on `[breakpoints[i], breakpoints[i+1])`.
    PiecewiseDensity { breakpoints: Vec<S>, levels: Vec<S> },
    /// Density `2 - 4|y - 1/2|` on `[0, 1]`.
    Tent,
    /// Uniform on `[a, b]`.
    Uniform { a: S, b: S },
    /// Piecewise-linear c.d.f. through the given `(y, F(y))` knots.
    CustomCdf { knots: Vec<(S, S)> },
}

/// Terminal behavior: at `t >= time` the signal jumps to `post_value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon<S> {
    pub time: S,
    pub post_value: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalModel<S> {
    kind: SignalKind<S>,
    horizon: Option<Horizon<S>>,
    shift: S,
}

impl<S: Real> SignalModel<S> {
    pub fn new(kind: SignalKind<S>) -> Result<Self, ModelError> {
        validate_kind(&kind)?;
        Ok(Self { kind, horizon: None, shift: S::zero() })
    }

    /// At `t >= time` the law becomes a point mass at `post_value`.
    /// `post_value` must dominate the pre-horizon support so that the
    /// comonotone paths stay increasing in time.
    pub fn with_horizon(mut self, time: S, post_value: S) -> Result<Self, ModelError> {
        if time < S::zero() {
            return Err(ModelError::Invalid("horizon must be >= 0".into()));
        }
        let (_, hi) = kind_support(&self.kind);
        if post_value < hi {
            return Err(ModelError::Invalid(
                "post_value must dominate the pre-horizon support".into(),
            ));
        }
        self.horizon = Some(Horizon { time, post_value });
        Ok(self)
    }

    /// Default horizon rule: `post_value = r + 1 + sup(support)`.
    pub fn with_default_horizon(self, time: S, r: S) -> Result<Self, ModelError> {
        let (_, hi) = kind_support(&self.kind);
        let post = r + S::one() + hi;
        self.with_horizon(time, post)
    }

    /// Additive offset applied to every signal value (perturbation experiments).
    pub fn with_shift(mut self, eps: S) -> Result<Self, ModelError> {
        if eps < S::zero() {
            return Err(ModelError::Invalid("shift must be >= 0".into()));
        }
        self.shift = eps;
        Ok(self)
    }

    pub fn kind(&self) -> &SignalKind<S> {
        &self.kind
    }

    pub fn horizon(&self) -> Option<Horizon<S>> {
        self.horizon
    }

    pub fn shift(&self) -> S {
        self.shift
    }

    fn post_active(&self, t: S) -> Option<S> {
        match self.horizon {
            Some(h) if t >= h.time => Some(h.post_value + self.shift),
            _ => None,
        }
    }

    /// C.d.f. `F_t(y)`, a total function on the reals.
    pub fn cdf_at(&self, t: S, y: S) -> S {
        match self.post_active(t) {
            Some(post) => {
                if y >= post {
                    S::one()
                } else {
                    S::zero()
                }
            }
            None => kind_cdf(&self.kind, y - self.shift),
        }
    }

    /// Density `f_t(y)` where the law declares one; `None` for atomic laws
    /// and at or past the horizon.
    pub fn density_at(&self, t: S, y: S) -> Option<S> {
        if self.post_active(t).is_some() {
            return None;
        }
        kind_density(&self.kind, y - self.shift)
    }

    /// Generalized inverse of the c.d.f.; `p = 0` maps to the left endpoint
    /// of the support.
    pub fn quantile_at(&self, t: S, p: S) -> S {
        match self.post_active(t) {
            Some(post) => post,
            None => kind_quantile(&self.kind, p.max(S::zero()).min(S::one())) + self.shift,
        }
    }

    /// Element-wise quantile transform of the given uniforms.
    pub fn sample_signals(&self, t: S, uniforms: &[S]) -> Vec<S> {
        uniforms.iter().map(|&u| self.quantile_at(t, u)).collect()
    }

    /// Support of the time-`t` law (including the shift).
    pub fn support_at(&self, t: S) -> (S, S) {
        match self.post_active(t) {
            Some(post) => (post, post),
            None => {
                let (lo, hi) = kind_support(&self.kind);
                (lo + self.shift, hi + self.shift)
            }
        }
    }

    /// Knots of the time-`t` c.d.f. in signal space, used by the mean field
    /// solver to make root bracketing exact for piecewise laws.
    pub fn breakpoints_at(&self, t: S) -> Vec<S> {
        match self.post_active(t) {
            Some(post) => vec![post],
            None => {
                let mut ys = kind_breakpoints(&self.kind);
                for y in &mut ys {
                    *y = *y + self.shift;
                }
                ys
            }
        }
    }
}

fn validate_kind<S: Real>(kind: &SignalKind<S>) -> Result<(), ModelError> {
    let bad = |m: &str| Err(ModelError::Invalid(m.into()));
    match kind {
        SignalKind::TwoAtom { locations, weights } => {
            if !(locations[0] < locations[1]) {
                return bad("two_atom locations must be strictly increasing");
            }
            if weights.iter().any(|w| *w <= S::zero()) {
                return bad("two_atom weights must be positive");
            }
            if ((weights[0] + weights[1]) - S::one()).abs() > s(1e-12) {
                return bad("two_atom weights must sum to 1");
            }
        }
        SignalKind::PiecewiseDensity { breakpoints, levels } => {
            if breakpoints.len() != levels.len() + 1 || levels.is_empty() {
                return bad("piecewise_density needs len(breakpoints) = len(levels) + 1");
            }
            if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                return bad("piecewise_density breakpoints must be strictly increasing");
            }
            if levels.iter().any(|l| *l < S::zero()) {
                return bad("piecewise_density levels must be >= 0");
            }
            let total: S = breakpoints
                .windows(2)
                .zip(levels)
                .map(|(w, l)| (w[1] - w[0]) * *l)
                .sum();
            if (total - S::one()).abs() > s(1e-12) {
                return bad("piecewise_density must integrate to 1");
            }
        }
        SignalKind::Tent => {}
        SignalKind::Uniform { a, b } => {
            if !(a < b) {
                return bad("uniform interval needs a < b");
            }
        }
        SignalKind::CustomCdf { knots } => {
            if knots.len() < 2 {
                return bad("custom_cdf needs at least two knots");
            }
            if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                return bad("custom_cdf knot abscissae must be strictly increasing");
            }
            if knots.windows(2).any(|w| w[1].1 < w[0].1) {
                return bad("custom_cdf values must be nondecreasing");
            }
            if knots[0].1.abs() > s(1e-12) || (knots.last().unwrap().1 - S::one()).abs() > s(1e-12)
            {
                return bad("custom_cdf values must run from 0 to 1");
            }
        }
    }
    Ok(())
}

fn kind_support<S: Real>(kind: &SignalKind<S>) -> (S, S) {
    match kind {
        SignalKind::TwoAtom { locations, .. } => (locations[0], locations[1]),
        SignalKind::PiecewiseDensity { breakpoints, .. } => {
            (breakpoints[0], *breakpoints.last().unwrap())
        }
        SignalKind::Tent => (S::zero(), S::one()),
        SignalKind::Uniform { a, b } => (*a, *b),
        SignalKind::CustomCdf { knots } => (knots[0].0, knots.last().unwrap().0),
    }
}

fn kind_breakpoints<S: Real>(kind: &SignalKind<S>) -> Vec<S> {
    match kind {
        SignalKind::TwoAtom { locations, .. } => locations.to_vec(),
        SignalKind::PiecewiseDensity { breakpoints, .. } => breakpoints.clone(),
        SignalKind::Tent => vec![S::zero(), s(0.5), S::one()],
        SignalKind::Uniform { a, b } => vec![*a, *b],
        SignalKind::CustomCdf { knots } => knots.iter().map(|k| k.0).collect(),
    }
}

fn kind_cdf<S: Real>(kind: &SignalKind<S>, y: S) -> S {
    match kind {
        SignalKind::TwoAtom { locations, weights } => {
            if y < locations[0] {
                S::zero()
            } else if y < locations[1] {
                weights[0]
            } else {
                S::one()
            }
        }
        SignalKind::PiecewiseDensity { breakpoints, levels } => {
            if y <= breakpoints[0] {
                return S::zero();
            }
            let mut acc = S::zero();
            for (w, level) in breakpoints.windows(2).zip(levels) {
                if y >= w[1] {
                    acc += (w[1] - w[0]) * *level;
                } else {
                    acc += (y - w[0]) * *level;
                    return acc.min(S::one());
                }
            }
            S::one()
        }
        SignalKind::Tent => {
            let half = s(0.5);
            if y <= S::zero() {
                S::zero()
            } else if y <= half {
                s::<S>(2.0) * y * y
            } else if y < S::one() {
                let d = S::one() - y;
                S::one() - s::<S>(2.0) * d * d
            } else {
                S::one()
            }
        }
        SignalKind::Uniform { a, b } => {
            if y <= *a {
                S::zero()
            } else if y >= *b {
                S::one()
            } else {
                (y - *a) / (*b - *a)
            }
        }
        SignalKind::CustomCdf { knots } => {
            if y <= knots[0].0 {
                return knots[0].1;
            }
            for w in knots.windows(2) {
                if y < w[1].0 {
                    let frac = (y - w[0].0) / (w[1].0 - w[0].0);
                    return w[0].1 + frac * (w[1].1 - w[0].1);
                }
            }
            S::one()
        }
    }
}

fn kind_density<S: Real>(kind: &SignalKind<S>, y: S) -> Option<S> {
    match kind {
        SignalKind::TwoAtom { .. } => None,
        SignalKind::PiecewiseDensity { breakpoints, levels } => {
            if y < breakpoints[0] || y >= *breakpoints.last().unwrap() {
                return Some(S::zero());
            }
            for (w, level) in breakpoints.windows(2).zip(levels) {
                if y < w[1] {
                    return Some(*level);
                }
            }
            Some(S::zero())
        }
        SignalKind::Tent => {
            if y < S::zero() || y > S::one() {
                Some(S::zero())
            } else {
                Some(s::<S>(2.0) - s::<S>(4.0) * (y - s(0.5)).abs())
            }
        }
        SignalKind::Uniform { a, b } => {
            if y < *a || y >= *b {
                Some(S::zero())
            } else {
                Some(S::one() / (*b - *a))
            }
        }
        SignalKind::CustomCdf { knots } => {
            if y < knots[0].0 || y >= knots.last().unwrap().0 {
                return Some(S::zero());
            }
            for w in knots.windows(2) {
                if y < w[1].0 {
                    return Some((w[1].1 - w[0].1) / (w[1].0 - w[0].0));
                }
            }
            Some(S::zero())
        }
    }
}

fn kind_quantile<S: Real>(kind: &SignalKind<S>, p: S) -> S {
    match kind {
        SignalKind::TwoAtom { locations, weights } => {
            if p <= weights[0] {
                locations[0]
            } else {
                locations[1]
            }
        }
        SignalKind::PiecewiseDensity { breakpoints, levels } => {
            if p <= S::zero() {
                // left endpoint of the support proper
                for (w, level) in breakpoints.windows(2).zip(levels) {
                    if *level > S::zero() {
                        return w[0];
                    }
                }
                return breakpoints[0];
            }
            let mut acc = S::zero();
            for (w, level) in breakpoints.windows(2).zip(levels) {
                let area = (w[1] - w[0]) * *level;
                if acc + area >= p && *level > S::zero() {
                    return w[0] + (p - acc) / *level;
                }
                acc += area;
            }
            *breakpoints.last().unwrap()
        }
        SignalKind::Tent => {
            let half = s(0.5);
            if p <= half {
                (p * half).sqrt()
            } else {
                S::one() - ((S::one() - p) * half).sqrt()
            }
        }
        SignalKind::Uniform { a, b } => *a + p * (*b - *a),
        SignalKind::CustomCdf { knots } => {
            if p <= knots[0].1 {
                return knots[0].0;
            }
            for w in knots.windows(2) {
                if w[1].1 >= p {
                    if w[1].1 > w[0].1 {
                        let frac = (p - w[0].1) / (w[1].1 - w[0].1);
                        return w[0].0 + frac * (w[1].0 - w[0].0);
                    }
                    return w[1].0;
                }
            }
            knots.last().unwrap().0
        }
    }
}

/// Named model presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// Two atoms `½δ_{1/2} + ½δ_2`, r = c = 1.
    Example51,
    /// Density `4·1_[3/8,1/2] + 1_[3/2,2]`, r = c = 1.
    Example56,
    /// Density `1_[0,1/2] + 1_[3/2,2]` (a continuum of equilibria), r = c = 1.
    Example57,
    /// Density `2·1_[1/2,1]`, r = c = 1.
    Example58,
    /// Tent density on [0,1], r = c = 1.
    Tent,
    /// Uniform density ½ on [0,2], r = 1.5, c = 1.
    Uniform02,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Example51,
        Preset::Example56,
        Preset::Example57,
        Preset::Example58,
        Preset::Tent,
        Preset::Uniform02,
    ];

    pub fn parse(name: &str) -> Option<Preset> {
        match name {
            "example-5.1" => Some(Preset::Example51),
            "example-5.6" => Some(Preset::Example56),
            "example-5.7" => Some(Preset::Example57),
            "example-5.8" => Some(Preset::Example58),
            "example-6.2" | "tent" => Some(Preset::Tent),
            "uniform02" => Some(Preset::Uniform02),
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Preset::Example51 => "example-5.1",
            Preset::Example56 => "example-5.6",
            Preset::Example57 => "example-5.7",
            Preset::Example58 => "example-5.8",
            Preset::Tent => "example-6.2",
            Preset::Uniform02 => "uniform02",
        }
    }

    /// Canonical horizon used by every preset.
    pub fn horizon_time<S: Real>() -> S {
        S::one()
    }

    pub fn build<S: Real>(&self) -> (SignalModel<S>, GameParams<S>) {
        let (kind, r, c) = match self {
            Preset::Example51 => (
                SignalKind::TwoAtom {
                    locations: [s(0.5), s(2.0)],
                    weights: [s(0.5), s(0.5)],
                },
                S::one(),
                S::one(),
            ),
            Preset::Example56 => (
                SignalKind::PiecewiseDensity {
                    breakpoints: vec![s(0.375), s(0.5), s(1.5), s(2.0)],
                    levels: vec![s(4.0), S::zero(), S::one()],
                },
                S::one(),
                S::one(),
            ),
            Preset::Example57 => (
                SignalKind::PiecewiseDensity {
                    breakpoints: vec![S::zero(), s(0.5), s(1.5), s(2.0)],
                    levels: vec![S::one(), S::zero(), S::one()],
                },
                S::one(),
                S::one(),
            ),
            Preset::Example58 => (
                SignalKind::PiecewiseDensity {
                    breakpoints: vec![s(0.5), S::one()],
                    levels: vec![s(2.0)],
                },
                S::one(),
                S::one(),
            ),
            Preset::Tent => (SignalKind::Tent, S::one(), S::one()),
            Preset::Uniform02 => (
                SignalKind::Uniform { a: S::zero(), b: s(2.0) },
                s(1.5),
                S::one(),
            ),
        };
        let model = SignalModel::new(kind)
            .and_then(|m| m.with_default_horizon(Self::horizon_time(), r))
            .expect("presets are valid");
        let params = GameParams::new(r, c).expect("presets are valid");
        (model, params)
    }
}

/// Key-value configuration for models, parsed from TOML text.
///
/// Either `preset = "name"` (with optional overrides) or an explicit
/// `kind` with the fields that kind needs. See the README for the schema.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub preset: Option<String>,
    pub kind: Option<String>,
    pub locations: Option<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
    pub breakpoints: Option<Vec<f64>>,
    pub levels: Option<Vec<f64>>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub knots: Option<Vec<[f64; 2]>>,
    pub horizon: Option<f64>,
    pub post_value: Option<f64>,
    pub shift: Option<f64>,
    pub r: Option<f64>,
    pub c: Option<f64>,
}

impl ModelConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ModelError> {
        toml::from_str(text).map_err(|e| ModelError::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<(SignalModel<f64>, GameParams<f64>), ModelError> {
        let (mut model, mut params) = if let Some(name) = &self.preset {
            let preset = Preset::parse(name)
                .ok_or_else(|| ModelError::Config(format!("unknown preset '{name}'")))?;
            preset.build::<f64>()
        } else {
            let kind = self.explicit_kind()?;
            let r = self
                .r
                .ok_or_else(|| ModelError::Config("explicit models must set r".into()))?;
            let c = self.c.unwrap_or(1.0);
            let model = SignalModel::new(kind)?;
            let model = match (self.horizon, self.post_value) {
                (Some(t), Some(p)) => model.with_horizon(t, p)?,
                (Some(t), None) => model.with_default_horizon(t, r)?,
                (None, Some(_)) => {
                    return Err(ModelError::Config("post_value given without horizon".into()))
                }
                (None, None) => model,
            };
            (model, GameParams::new(r, c)?)
        };
        if let Some(r) = self.r {
            params.r = r;
        }
        if let Some(c) = self.c {
            params = GameParams::new(params.r, c)?;
        }
        if self.preset.is_some() {
            if let Some(t) = self.horizon {
                let post = self
                    .post_value
                    .unwrap_or_else(|| params.r + 1.0 + model.support_at(0.0).1);
                model = SignalModel::new(model.kind().clone())?.with_horizon(t, post)?;
            } else if let Some(p) = self.post_value {
                let t = model.horizon().map(|h| h.time).unwrap_or(1.0);
                model = SignalModel::new(model.kind().clone())?.with_horizon(t, p)?;
            }
        }
        if let Some(eps) = self.shift {
            model = model.with_shift(eps)?;
        }
        if let Some(h) = model.horizon() {
            if h.post_value + model.shift() <= params.r {
                return Err(ModelError::Config(
                    "post_value must lie strictly above r".into(),
                ));
            }
        }
        Ok((model, params))
    }

    fn explicit_kind(&self) -> Result<SignalKind<f64>, ModelError> {
        let kind = self
            .kind
            .as_deref()
            .ok_or_else(|| ModelError::Config("either preset or kind is required".into()))?;
        let missing = |f: &str| ModelError::Config(format!("kind '{kind}' requires field '{f}'"));
        match kind {
            "two_atom" => {
                let locs = self.locations.clone().ok_or_else(|| missing("locations"))?;
                let ws = self.weights.clone().ok_or_else(|| missing("weights"))?;
                if locs.len() != 2 || ws.len() != 2 {
                    return Err(ModelError::Config(
                        "two_atom takes exactly two locations and two weights".into(),
                    ));
                }
                Ok(SignalKind::TwoAtom {
                    locations: [locs[0], locs[1]],
                    weights: [ws[0], ws[1]],
                })
            }
            "piecewise_density" => Ok(SignalKind::PiecewiseDensity {
                breakpoints: self.breakpoints.clone().ok_or_else(|| missing("breakpoints"))?,
                levels: self.levels.clone().ok_or_else(|| missing("levels"))?,
            }),
            "tent" => Ok(SignalKind::Tent),
            "uniform" => Ok(SignalKind::Uniform {
                a: self.a.ok_or_else(|| missing("a"))?,
                b: self.b.ok_or_else(|| missing("b"))?,
            }),
            "custom_cdf" => {
                let knots = self.knots.clone().ok_or_else(|| missing("knots"))?;
                Ok(SignalKind::CustomCdf {
                    knots: knots.into_iter().map(|k| (k[0], k[1])).collect(),
                })
            }
            other => Err(ModelError::Config(format!("unknown kind '{other}'"))),
        }
    }
}

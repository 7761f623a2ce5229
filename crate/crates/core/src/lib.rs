//! Nash equilibria of an n-player optimal-stopping game and its mean
//! field limit.
//!
//! Agents each observe an i.i.d. signal process and stop once their
//! signal plus `c` times the stopped fraction reaches the threshold `r`.
//! The crate computes the equilibrium count sets of the finite game,
//! solves the mean field fixed-point equation, evaluates the closed-form
//! limit statistics that connect the two, and runs reproducible Monte
//! Carlo experiments comparing them.
//!
//! The numeric kernels are generic over the scalar type ([`Real`], i.e.
//! `f32` or `f64`); the `*64` aliases below fix `f64`.

pub mod asymptotics;
pub mod mean_field;
pub mod monte_carlo;
pub mod n_player;
pub mod rng;
pub mod scalar;
pub mod signal;

pub use scalar::Real;
pub use signal::{GameParams, Horizon, ModelConfig, ModelError, Preset, SignalKind, SignalModel};

pub type SignalModel64 = signal::SignalModel<f64>;
pub type GameParams64 = signal::GameParams<f64>;
pub type MfSolution64 = mean_field::MfSolution<f64>;
pub type MfQuartet64 = mean_field::MfQuartet<f64>;
pub type MfFlow64 = mean_field::MfFlow<f64>;
pub type SolveCfg64 = mean_field::SolveCfg<f64>;
pub type SignalSample64 = n_player::SignalSample<f64>;
pub type EquilibriumPath64 = n_player::EquilibriumPath<f64>;
pub type AlphaStats64 = asymptotics::AlphaStats<f64>;

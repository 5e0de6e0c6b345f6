//! Distance and angle distortion of random Gaussian ReLU layers.
//!
//! A layer `x ↦ ρ(Mx)` with `M` an `m × n` matrix of i.i.d. `N(0, 1/m)`
//! entries satisfies
//!
//! ```text
//! E‖ρ(Mx) − ρ(My)‖² = ½‖x − y‖² − ‖x‖‖y‖ψ(θ),   ψ(θ) = (sin θ − θ cos θ)/π.
//! ```
//!
//! [`geometry`] holds the closed forms, [`layer`] the seeded layers,
//! [`estimators`] the Monte Carlo estimators and the z-score test against
//! the `+ψ` variant, [`experiments`] the sweeps, and [`report`] / [`cli`]
//! the CSV and JSON output.

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod geometry;
pub mod layer;
pub mod report;
pub mod rng;

pub use error::{Error, Result};

//! Closed forms for a single random ReLU layer `x -> max(Mx, 0)` whose
//! entries are i.i.d. `N(0, 1/m)`.
//!
//! For inputs `x`, `y` at angle `θ` with
//! `ψ(θ) = (sin θ − θ cos θ) / π`:
//!
//! ```text
//! E ‖ρ(Mx) − ρ(My)‖² = ½‖x − y‖² − ‖x‖‖y‖ψ(θ)        (corrected)
//!                      ½‖x − y‖² + ‖x‖‖y‖ψ(θ)        (original claim)
//! E[ρ(mᵢᵀx) ρ(mᵢᵀy)]  = ‖x‖‖y‖ (cos θ + ψ(θ)) / (2m)
//! E cos∠(ρ(Mx), ρ(My)) ≈ cos θ + ψ(θ)
//! ```
//!
//! The corrected value always lies in `[¼‖x − y‖², ½‖x − y‖²]`.

use std::f64::consts::{FRAC_1_PI, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Out-of-range angles closer than this are clamped rather than rejected.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

/// Below this angle the unit shrinkage ratio returns its limit ½.
pub const SMALL_ANGLE: f64 = 1e-6;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Derived quantities of a pair of nonzero vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGeometry {
    pub norm_x: f64,
    pub norm_y: f64,
    pub cos_theta: f64,
    pub theta: f64,
    pub psi: f64,
    /// `‖x − y‖²`.
    pub sq_dist: f64,
}

impl PairGeometry {
    /// Geometry of a pair given only norms and angle. `sq_dist` follows from
    /// the law of cosines.
    pub fn from_norms_and_angle(norm_x: f64, norm_y: f64, theta: f64) -> Result<Self> {
        if !(norm_x >= 0.0 && norm_x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "norm_x",
                reason: format!("{norm_x} is not a finite nonnegative number"),
            });
        }
        if !(norm_y >= 0.0 && norm_y.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "norm_y",
                reason: format!("{norm_y} is not a finite nonnegative number"),
            });
        }
        let theta = check_angle(theta)?;
        let cos_theta = theta.cos();
        let sq = norm_x * norm_x + norm_y * norm_y - 2.0 * norm_x * norm_y * cos_theta;
        Ok(Self {
            norm_x,
            norm_y,
            cos_theta,
            theta,
            psi: psi_unchecked(theta),
            sq_dist: sq.max(0.0),
        })
    }

    /// Unit-norm pair at angle `theta`.
    pub fn unit(theta: f64) -> Result<Self> {
        Self::from_norms_and_angle(1.0, 1.0, theta)
    }
}

/// Which closed form of the expected squared output distance to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Claim {
    /// `½‖x − y‖² − ‖x‖‖y‖ψ`.
    Corrected,
    /// `½‖x − y‖² + ‖x‖‖y‖ψ`, the formula being refuted.
    OriginalClaim,
}

impl Claim {
    pub fn name(self) -> &'static str {
        match self {
            Claim::Corrected => "Corrected",
            Claim::OriginalClaim => "OriginalClaim",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceClaim {
    pub variant: Claim,
    pub value: f64,
}

/// Angle between `x` and `y` together with the derived pair quantities.
pub fn angle_between(x: &[f64], y: &[f64]) -> Result<PairGeometry> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::ZeroVector);
    }
    let norm_x = norm(x);
    let norm_y = norm(y);
    if norm_x == 0.0 || norm_y == 0.0 {
        return Err(Error::ZeroVector);
    }
    let cos_theta = (dot(x, y) / (norm_x * norm_y)).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    Ok(PairGeometry {
        norm_x,
        norm_y,
        cos_theta,
        theta,
        psi: psi_unchecked(theta),
        sq_dist: sq_dist(x, y),
    })
}

/// Validates an angle against `[0, π]`, clamping values within
/// [`ANGLE_TOLERANCE`] of the interval.
pub fn check_angle(theta: f64) -> Result<f64> {
    if !(-ANGLE_TOLERANCE..=PI + ANGLE_TOLERANCE).contains(&theta) {
        return Err(Error::Domain {
            name: "theta",
            value: theta,
            lo: 0.0,
            hi: PI,
        });
    }
    Ok(theta.clamp(0.0, PI))
}

fn psi_unchecked(theta: f64) -> f64 {
    (FRAC_1_PI * (theta.sin() - theta * theta.cos())).clamp(0.0, 1.0)
}

/// `ψ(θ) = (sin θ − θ cos θ) / π`, nondecreasing from 0 at `θ = 0` to 1 at `θ = π`.
pub fn psi_of_angle(theta: f64) -> Result<f64> {
    Ok(psi_unchecked(check_angle(theta)?))
}

/// Expected squared output distance under the chosen formula.
pub fn expected_sq_dist(geom: &PairGeometry, variant: Claim) -> DistanceClaim {
    let half = 0.5 * geom.sq_dist;
    let angular = geom.norm_x * geom.norm_y * geom.psi;
    let value = match variant {
        Claim::Corrected => half - angular,
        Claim::OriginalClaim => half + angular,
    };
    DistanceClaim {
        variant,
        value: value.max(0.0),
    }
}

/// `E[ρ(mᵢᵀx) ρ(mᵢᵀy)]` for one row of an `m`-row layer: the order-one
/// arc-cosine kernel scaled by `1/m`.
pub fn cross_term_closed_form(theta: f64, norm_x: f64, norm_y: f64, m: usize) -> Result<f64> {
    let theta = check_angle(theta)?;
    check_rows(m)?;
    Ok(norm_x * norm_y / (2.0 * m as f64) * (theta.cos() + psi_unchecked(theta)))
}

/// The same cross term written through the evaluated integral
/// `∫₀^{π−θ} sin t sin(t + θ) dt = (π/2) cos θ + ½(sin θ − θ cos θ)`.
pub fn cross_term_integral_form(theta: f64, norm_x: f64, norm_y: f64, m: usize) -> Result<f64> {
    let theta = check_angle(theta)?;
    check_rows(m)?;
    Ok(norm_x * norm_y / (m as f64 * PI) * cross_integral_closed_form(theta))
}

/// `(π/2) cos θ + ½(sin θ − θ cos θ)`, assuming `θ ∈ [0, π]`.
pub fn cross_integral_closed_form(theta: f64) -> f64 {
    FRAC_PI_2 * theta.cos() + 0.5 * (theta.sin() - theta * theta.cos())
}

fn check_rows(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "layer needs at least one row".into(),
        });
    }
    Ok(())
}

/// Predicted cosine of the output angle, `cos θ + ψ(θ)`, in `[0, 1]`.
pub fn expected_output_cos(theta: f64) -> Result<f64> {
    let theta = check_angle(theta)?;
    Ok((theta.cos() + psi_unchecked(theta)).clamp(0.0, 1.0))
}

/// One step of the expected angle map `θ ↦ arccos(cos θ + ψ(θ))`.
pub fn angle_map(theta: f64) -> Result<f64> {
    Ok(expected_output_cos(theta)?.acos())
}

/// `cos θ_L` for the `depth`-fold iterate of [`angle_map`]; depth 0 is `cos θ`.
pub fn iterated_output_cos(theta: f64, depth: usize) -> Result<f64> {
    let mut t = check_angle(theta)?;
    for _ in 0..depth {
        t = angle_map(t)?;
    }
    Ok(t.cos())
}

/// Envelope `(¼‖x − y‖², ½‖x − y‖²)` containing the corrected expectation.
pub fn shrinkage_bounds(geom: &PairGeometry) -> (f64, f64) {
    (0.25 * geom.sq_dist, 0.5 * geom.sq_dist)
}

/// `sin θ − θ cos θ`, by its Taylor series near zero where the direct
/// difference cancels.
fn psi_numerator(theta: f64) -> f64 {
    if theta > 0.25 {
        return theta.sin() - theta * theta.cos();
    }
    // Σ_{k≥1} (−1)^{k+1} 2k θ^{2k+1} / (2k+1)!
    let t2 = theta * theta;
    let mut power = theta * t2; // θ^{2k+1}
    let mut factorial = 6.0; // (2k+1)!
    let mut sum = 0.0;
    for k in 1..=10 {
        let kf = k as f64;
        let term = 2.0 * kf * power / factorial;
        sum += if k % 2 == 1 { term } else { -term };
        power *= t2;
        factorial *= (2.0 * kf + 2.0) * (2.0 * kf + 3.0);
    }
    sum
}

/// `E‖Δout‖² / ‖Δin‖²` for a unit-norm pair at angle `θ`:
/// `½ − ψ(θ) / (2(1 − cos θ))`. Strictly decreasing from ½ (as `θ → 0`) to ¼ at `π`.
pub fn unit_shrinkage_ratio(theta: f64) -> Result<f64> {
    let theta = check_angle(theta)?;
    if theta < SMALL_ANGLE {
        return Ok(0.5);
    }
    // 2(1 − cos θ) = 4 sin²(θ/2)
    let half_sin = (0.5 * theta).sin();
    Ok(0.5 - FRAC_1_PI * psi_numerator(theta) / (4.0 * half_sin * half_sin))
}

/// `n` equally spaced angles covering `[0, π]` inclusive.
pub fn angle_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    PI
                } else {
                    PI * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

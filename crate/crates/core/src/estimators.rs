//! Monte Carlo estimators with standard errors, plus the independent
//! oracles used to check the closed forms: a planar sampler for the cross
//! term and composite Simpson quadrature for its integral.
//!
//! Trial `t` of an estimator with master seed `s` draws its layer from
//! `derive_seed(s, t)`. Trials may run on any number of threads; per-trial
//! values are always reduced in ascending trial order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Claim, PairGeometry};
use crate::layer::{relu, ImplicitLayer};
use crate::rng;

/// Mean and standard error of a sample of i.i.d. trial values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√trials`; zero when `trials < 2`.
    pub stderr: f64,
    pub trials: usize,
    pub master_seed: u64,
}

impl MomentEstimate {
    /// Two-pass mean and variance, accumulated in slice order.
    pub fn from_samples(values: &[f64], master_seed: u64) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                trials: 0,
                master_seed,
            };
        }
        let mut sum = 0.0;
        for v in values {
            sum += v;
        }
        let mean = sum / n as f64;
        let stderr = if n < 2 {
            0.0
        } else {
            let mut ss = 0.0;
            for v in values {
                ss += (v - mean) * (v - mean);
            }
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        };
        Self {
            mean,
            stderr,
            trials: n,
            master_seed,
        }
    }

    /// `(mean − target) / stderr`, with `0/0 = 0`.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.mean - target;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    /// `|mean − target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 2 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: format!("need at least 2 trials for a standard error, got {trials}"),
        });
    }
    Ok(())
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(())
}

/// Per-trial values of `‖ρ(Mx) − ρ(My)‖²` in trial order.
pub fn sq_dist_realizations(
    x: &[f64],
    y: &[f64],
    m: usize,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<f64>> {
    check_pair(x, y)?;
    let n = x.len();
    ImplicitLayer::new(n, m, 0)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            ImplicitLayer::new(n, m, rng::derive_seed(master_seed, t as u64))?
                .sq_dist_realization(x, y)
        })
        .collect()
}

/// Estimate of `E‖ρ(Mx) − ρ(My)‖²` over `trials` independent layers.
pub fn mc_sq_dist(
    x: &[f64],
    y: &[f64],
    m: usize,
    trials: usize,
    master_seed: u64,
) -> Result<MomentEstimate> {
    check_trials(trials)?;
    let values = sq_dist_realizations(x, y, m, trials, master_seed)?;
    Ok(MomentEstimate::from_samples(&values, master_seed))
}

/// Cosine of the angle between two vectors, or `None` if either is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let aa = geometry::dot(a, a);
    let bb = geometry::dot(b, b);
    if aa == 0.0 || bb == 0.0 {
        return None;
    }
    Some((geometry::dot(a, b) / (aa * bb).sqrt()).clamp(-1.0, 1.0))
}

/// Output-cosine estimate together with the number of excluded trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineEstimate {
    /// Statistics over the non-degenerate trials only.
    pub estimate: MomentEstimate,
    /// Trials in which an output vector was identically zero.
    pub degenerate_trials: usize,
}

/// Per-trial output cosines in trial order; `None` marks a trial with an
/// all-zero output vector.
pub fn output_cos_realizations(
    x: &[f64],
    y: &[f64],
    m: usize,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<Option<f64>>> {
    check_pair(x, y)?;
    if geometry::norm(x) == 0.0 || geometry::norm(y) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let n = x.len();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let layer = ImplicitLayer::new(n, m, rng::derive_seed(master_seed, t as u64))?;
            let (a, b) = layer.relu_forward_pair(x, y)?;
            Ok(cosine(&a, &b))
        })
        .collect()
}

/// Estimate of `E cos∠(ρ(Mx), ρ(My))`.
pub fn mc_output_cos(
    x: &[f64],
    y: &[f64],
    m: usize,
    trials: usize,
    master_seed: u64,
) -> Result<CosineEstimate> {
    check_trials(trials)?;
    let per_trial = output_cos_realizations(x, y, m, trials, master_seed)?;
    let values: Vec<f64> = per_trial.iter().flatten().copied().collect();
    if values.is_empty() {
        return Err(Error::AllTrialsDegenerate { trials });
    }
    Ok(CosineEstimate {
        estimate: MomentEstimate::from_samples(&values, master_seed),
        degenerate_trials: trials - values.len(),
    })
}

/// Planar oracle for the single-row cross term: with `g` a standard 2-D
/// Gaussian, `u = (1, 0)` and `v = (cos θ, sin θ)`, averages
/// `ρ(g·u) ρ(g·v)`, whose expectation is `½(cos θ + ψ(θ))`.
pub fn cross_term_mc_2d(theta: f64, trials: usize, master_seed: u64) -> Result<MomentEstimate> {
    let theta = geometry::check_angle(theta)?;
    check_trials(trials)?;
    let (c, s) = (theta.cos(), theta.sin());
    let values: Vec<f64> = (0..trials as u64)
        .map(|t| {
            let g1 = rng::normal_at(master_seed, t, 0);
            let g2 = rng::normal_at(master_seed, t, 1);
            relu(g1) * relu(c * g1 + s * g2)
        })
        .collect();
    Ok(MomentEstimate::from_samples(&values, master_seed))
}

/// Panels used by [`quadrature_cross_integral`].
pub const SIMPSON_PANELS: usize = 1 << 14;

/// Composite Simpson rule on `[a, b]` with an even number of panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 2 && panels.is_multiple_of(2), "Simpson needs an even panel count");
    let h = (b - a) / panels as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..panels {
        let v = f(a + k as f64 * h);
        if k % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b))
}

/// `∫₀^{π−θ} sin t · sin(t + θ) dt` by Simpson's rule.
pub fn quadrature_cross_integral(theta: f64) -> Result<f64> {
    let theta = geometry::check_angle(theta)?;
    let upper = std::f64::consts::PI - theta;
    if upper == 0.0 {
        return Ok(0.0);
    }
    Ok(simpson(|t| t.sin() * (t + theta).sin(), 0.0, upper, SIMPSON_PANELS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    SupportsCorrected,
    SupportsOriginal,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::SupportsCorrected => "SupportsCorrected",
            Verdict::SupportsOriginal => "SupportsOriginal",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

/// z-score thresholds: a hypothesis is accepted within `z_accept` and
/// rejected beyond `z_reject`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub z_accept: f64,
    pub z_reject: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            z_accept: 4.0,
            z_reject: 10.0,
        }
    }
}

impl Thresholds {
    pub fn classify(&self, z_corrected: f64, z_original: f64) -> Verdict {
        let (c, o) = (z_corrected.abs(), z_original.abs());
        if c <= self.z_accept && o >= self.z_reject {
            Verdict::SupportsCorrected
        } else if o <= self.z_accept && c >= self.z_reject {
            Verdict::SupportsOriginal
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZScoreVerdict {
    pub z_corrected: f64,
    pub z_original: f64,
    pub verdict: Verdict,
    pub estimate: MomentEstimate,
    pub geometry: PairGeometry,
    pub corrected: f64,
    pub original: f64,
}

/// Smallest `ψ` at which the two formulas are considered distinguishable.
pub const MIN_PSI: f64 = 0.01;

/// Upper bound on the standard error of [`mc_sq_dist`]: each row term is
/// at most `(mᵢᵀ(x − y))²`, whose fourth moment gives a per-trial variance
/// of at most `3‖x − y‖⁴ / m`.
pub fn predicted_stderr(sq_dist: f64, m: usize, trials: usize) -> f64 {
    (3.0 / (m as f64 * trials as f64)).sqrt() * sq_dist
}

/// Runs [`mc_sq_dist`] and scores the estimate against both formulas.
pub fn refutation_test(
    x: &[f64],
    y: &[f64],
    m: usize,
    trials: usize,
    master_seed: u64,
    thresholds: Thresholds,
) -> Result<ZScoreVerdict> {
    check_trials(trials)?;
    let geom = geometry::angle_between(x, y)?;
    let gap = geom.norm_x * geom.norm_y * geom.psi;
    let predicted = predicted_stderr(geom.sq_dist, m.max(1), trials);
    if geom.psi < MIN_PSI || gap < 5.0 * predicted {
        let required = if gap > 0.0 {
            (75.0 * geom.sq_dist * geom.sq_dist / (m.max(1) as f64 * gap * gap)).ceil()
        } else {
            f64::INFINITY
        };
        return Err(Error::HypothesesTooClose {
            gap,
            predicted_stderr: predicted,
            required_trials: if required.is_finite() {
                required.max(2.0) as u64
            } else {
                u64::MAX
            },
        });
    }
    let estimate = mc_sq_dist(x, y, m, trials, master_seed)?;
    let corrected = geometry::expected_sq_dist(&geom, Claim::Corrected).value;
    let original = geometry::expected_sq_dist(&geom, Claim::OriginalClaim).value;
    let z_corrected = estimate.z_score(corrected);
    let z_original = estimate.z_score(original);
    Ok(ZScoreVerdict {
        z_corrected,
        z_original,
        verdict: thresholds.classify(z_corrected, z_original),
        estimate,
        geometry: geom,
        corrected,
        original,
    })
}

/// Estimate of the Gaussian mean width `E sup_{x,y∈K} ⟨g, x − y⟩` of a
/// finite point set. For each draw of `g` the supremum over ordered pairs
/// is `max ⟨g, x⟩ − min ⟨g, x⟩`.
pub fn mean_width_estimate(
    points: &[Vec<f64>],
    g_samples: usize,
    master_seed: u64,
) -> Result<MomentEstimate> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    check_trials(g_samples)?;
    let n = points[0].len();
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "all coordinates must be finite".into(),
            });
        }
    }
    let values: Vec<f64> = (0..g_samples as u64)
        .into_par_iter()
        .map(|s| {
            let g: Vec<f64> = (0..n as u64).map(|k| rng::normal_at(master_seed, s, k)).collect();
            let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let v = geometry::dot(&g, p);
                (lo.min(v), hi.max(v))
            });
            hi - lo
        })
        .collect();
    Ok(MomentEstimate::from_samples(&values, master_seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cross_integral_closed_form, expected_output_cos, psi_of_angle};
    use std::f64::consts::{FRAC_1_PI, FRAC_PI_2, PI};

    fn unit(n: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    }

    fn planar(n: usize, theta: f64) -> (Vec<f64>, Vec<f64>) {
        let x = unit(n, 0);
        let mut y = vec![0.0; n];
        y[0] = theta.cos();
        y[1] = theta.sin();
        (x, y)
    }

    #[test]
    fn estimate_from_samples() {
        let e = MomentEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 9);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert_eq!((e.trials, e.master_seed), (4, 9));
        assert_eq!(MomentEstimate::from_samples(&[3.0], 0).stderr, 0.0);
        assert_eq!(e.z_score(2.5), 0.0);
        let flat = MomentEstimate::from_samples(&[1.0, 1.0], 0);
        assert_eq!(flat.z_score(1.0), 0.0);
        assert_eq!(flat.z_score(0.0), f64::INFINITY);
    }

    #[test]
    fn orthogonal_pair_matches_corrected() {
        let (x, y) = planar(64, FRAC_PI_2);
        let e = mc_sq_dist(&x, &y, 1024, 400, 0).unwrap();
        assert!(e.within(1.0 - FRAC_1_PI, 4.0), "{e:?}");
        assert!(!e.within(1.0 + FRAC_1_PI, 10.0));
    }

    #[test]
    fn identical_pair_is_exactly_zero() {
        let (x, _) = planar(8, 0.0);
        let e = mc_sq_dist(&x, &x, 128, 10, 3).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
    }

    #[test]
    fn antipodal_pair_matches_one_not_three() {
        let x = unit(64, 3);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        let e = mc_sq_dist(&x, &y, 1024, 400, 0).unwrap();
        assert!(e.within(1.0, 4.0), "{e:?}");
        assert!((e.mean - 3.0).abs() >= 10.0 * e.stderr);
    }

    #[test]
    fn trial_count_validated() {
        let (x, y) = planar(4, 1.0);
        assert!(mc_sq_dist(&x, &y, 16, 1, 0).is_err());
        assert!(mc_sq_dist(&x, &y[..3], 16, 4, 0).is_err());
        assert!(mc_sq_dist(&x, &y, 0, 4, 0).is_err());
    }

    #[test]
    fn scale_equivariance_is_exact_for_powers_of_two() {
        let x = [0.3, -0.7, 0.2];
        let y = [-0.1, 0.4, 0.9];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let y2: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        let a = sq_dist_realizations(&x, &y, 64, 20, 5).unwrap();
        let b = sq_dist_realizations(&x2, &y2, 64, 20, 5).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_eq!(4.0 * u, *v);
        }
        let s = mc_sq_dist(&[0.3, 0.1], &[0.0, 0.5], 64, 50, 1).unwrap();
        let t = mc_sq_dist(&[0.9, 0.3], &[0.0, 1.5], 64, 50, 1).unwrap();
        assert!((9.0 * s.mean - t.mean).abs() <= 1e-12 * t.mean);
    }

    #[test]
    fn estimators_are_pure_functions_of_the_seed() {
        let (x, y) = planar(16, 1.2);
        let a = mc_sq_dist(&x, &y, 256, 30, 17).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_sq_dist(&x, &y, 256, 30, 17).unwrap());
        assert_eq!(a, b);
        let c = mc_sq_dist(&x, &y, 256, 30, 18).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn output_cos_examples() {
        let (x, _) = planar(8, 0.0);
        let e = mc_output_cos(&x, &x, 64, 5, 1).unwrap().estimate;
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));

        for (theta, target) in [(PI, 0.0), (FRAC_PI_2, FRAC_1_PI)] {
            let (x, y) = planar(64, theta);
            let c = mc_output_cos(&x, &y, 4096, 100, 0).unwrap();
            assert_eq!(c.degenerate_trials, 0);
            assert!(c.estimate.within(target, 4.0), "theta {theta}: {:?}", c.estimate);
            assert!((target - expected_output_cos(theta).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn output_cos_degenerate_handling() {
        // one row: an output is zero about three quarters of the time
        let (x, y) = planar(2, 2.0);
        let c = mc_output_cos(&x, &y, 1, 200, 4).unwrap();
        assert!(c.degenerate_trials > 0);
        assert_eq!(c.estimate.trials + c.degenerate_trials, 200);

        let x = [1.0];
        let y = [-1.0];
        assert_eq!(
            mc_output_cos(&x, &y, 1, 10, 0),
            Err(Error::AllTrialsDegenerate { trials: 10 })
        );
        assert_eq!(mc_output_cos(&[0.0], &[1.0], 1, 10, 0), Err(Error::ZeroVector));
    }

    #[test]
    fn planar_cross_term_examples() {
        let e = cross_term_mc_2d(PI, 1000, 0).unwrap();
        assert!(e.within(0.0, 4.0));
        let e = cross_term_mc_2d(0.0, 100_000, 0).unwrap();
        assert!(e.within(0.5, 4.0), "{e:?}");
        let e = cross_term_mc_2d(FRAC_PI_2, 100_000, 0).unwrap();
        assert!(e.within(0.159_154_943_091_895_34, 4.0), "{e:?}");
        assert!(cross_term_mc_2d(-1.0, 10, 0).is_err());
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|t| t * t * t - 2.0 * t + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_examples() {
        assert!((quadrature_cross_integral(0.0).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(quadrature_cross_integral(PI).unwrap(), 0.0);
        assert!((quadrature_cross_integral(FRAC_PI_2).unwrap() - 0.5).abs() < 1e-12);
        // 30-digit quadrature at π/3: 0.956611477490518196458968815923
        assert!((quadrature_cross_integral(PI / 3.0).unwrap() - 0.956_611_477_490_518_2).abs() < 1e-12);
        assert!(quadrature_cross_integral(3.5).is_err());
    }

    #[test]
    fn oracle_triangle_on_eleven_points() {
        for k in 0..11 {
            let theta = PI * k as f64 / 10.0;
            let closed = cross_integral_closed_form(theta);
            assert!((quadrature_cross_integral(theta).unwrap() - closed).abs() <= 1e-9);
            let target = 0.5 * (theta.cos() + psi_of_angle(theta).unwrap());
            let e = cross_term_mc_2d(theta, 100_000, 1).unwrap();
            assert!(e.within(target, 4.0), "theta {theta}: {e:?} vs {target}");
        }
    }

    #[test]
    fn verdict_rule() {
        let t = Thresholds::default();
        assert_eq!(t.classify(1.0, -50.0), Verdict::SupportsCorrected);
        assert_eq!(t.classify(-4.0, 10.0), Verdict::SupportsCorrected);
        assert_eq!(t.classify(30.0, 0.5), Verdict::SupportsOriginal);
        assert_eq!(t.classify(5.0, 50.0), Verdict::Inconclusive);
        assert_eq!(t.classify(1.0, 9.0), Verdict::Inconclusive);
    }

    #[test]
    fn refutation_examples() {
        let x = unit(64, 0);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        let v = refutation_test(&x, &y, 1024, 400, 0, Thresholds::default()).unwrap();
        assert_eq!(v.verdict, Verdict::SupportsCorrected);
        assert!(v.z_original.abs() > 10.0);

        let (x, y) = planar(64, FRAC_PI_2);
        let v = refutation_test(&x, &y, 1024, 400, 0, Thresholds::default()).unwrap();
        assert_eq!(v.verdict, Verdict::SupportsCorrected, "{v:?}");

        let err = refutation_test(&x, &x, 1024, 400, 0, Thresholds::default()).unwrap_err();
        assert!(matches!(err, Error::HypothesesTooClose { required_trials: u64::MAX, .. }));
    }

    #[test]
    fn refutation_reports_required_trials() {
        // ψ(0.4) ≈ 0.0066 lies below the distinguishability floor
        let (x, y) = planar(4, 0.4);
        assert!(matches!(
            refutation_test(&x, &y, 1024, 400, 0, Thresholds::default()),
            Err(Error::HypothesesTooClose { .. })
        ));
        // ψ(0.6) ≈ 0.022 but two trials on two rows are too few
        let (x, y) = planar(4, 0.6);
        match refutation_test(&x, &y, 2, 2, 0, Thresholds::default()) {
            Err(Error::HypothesesTooClose { required_trials, .. }) => assert!(required_trials > 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mean_width_examples() {
        let k = vec![unit(5, 0), unit(5, 1)];
        let e = mean_width_estimate(&k, 100_000, 0).unwrap();
        assert!(e.within(std::f64::consts::FRAC_2_SQRT_PI, 4.0), "{e:?}");

        let p = vec![0.3, -0.2];
        let e = mean_width_estimate(&[p.clone(), p], 100, 0).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));

        let e1 = unit(3, 0);
        let neg: Vec<f64> = e1.iter().map(|v| -v).collect();
        let e = mean_width_estimate(&[e1, neg], 100_000, 2).unwrap();
        assert!(e.within(1.595_769_121_605_730_7, 4.0), "{e:?}");
    }

    #[test]
    fn mean_width_errors() {
        assert_eq!(mean_width_estimate(&[vec![1.0]], 10, 0), Err(Error::TooFewPoints(1)));
        assert!(mean_width_estimate(&[vec![1.0], vec![1.0, 2.0]], 10, 0).is_err());
        assert!(mean_width_estimate(&[vec![1.0], vec![f64::NAN]], 10, 0).is_err());
    }
}

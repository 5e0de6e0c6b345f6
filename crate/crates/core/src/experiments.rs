//! Sweeps over angle, width and depth, and the synthetic class-separation
//! study.
//!
//! Every experiment is a pure function of its parameters and master seed.
//! Grid points of one sweep share the master seed (common random numbers),
//! so neighbouring points see the same layers and the curves are smooth.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{self, cosine, MomentEstimate};
use crate::geometry::{self, Claim, PairGeometry};
use crate::layer::{ImplicitLayer, LayerStack};
use crate::rng::{self, Stream};

/// `x = e₁`, `y = cos θ e₁ + sin θ e₂` in `ℝⁿ`.
pub fn planar_pair(n: usize, theta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "a planar pair needs at least two dimensions".into(),
        });
    }
    let theta = geometry::check_angle(theta)?;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    x[0] = 1.0;
    y[0] = theta.cos();
    y[1] = theta.sin();
    Ok((x, y))
}

/// Spread of single realizations around the corrected expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationStats {
    pub rms: f64,
    pub max: f64,
}

/// One row of a distance sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta: f64,
    pub m: usize,
    pub trials: usize,
    pub layers: usize,
    pub empirical: MomentEstimate,
    pub analytic_corrected: f64,
    pub analytic_original: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
    pub deviation: Option<DeviationStats>,
}

impl SweepRecord {
    pub fn new(
        geom: &PairGeometry,
        m: usize,
        trials: usize,
        empirical: MomentEstimate,
        deviation: Option<DeviationStats>,
    ) -> Self {
        let (bound_lower, bound_upper) = geometry::shrinkage_bounds(geom);
        Self {
            theta: geom.theta,
            m,
            trials,
            layers: 1,
            empirical,
            analytic_corrected: geometry::expected_sq_dist(geom, Claim::Corrected).value,
            analytic_original: geometry::expected_sq_dist(geom, Claim::OriginalClaim).value,
            bound_lower,
            bound_upper,
            deviation,
        }
    }
}

/// One row of an angle or depth sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRecord {
    pub theta: f64,
    pub depth: usize,
    pub m: usize,
    pub trials: usize,
    /// Mean output cosine over the non-degenerate trials.
    pub empirical: MomentEstimate,
    pub degenerate_trials: usize,
    /// `cos θ` after `depth` iterations of `θ ↦ arccos(cos θ + ψ(θ))`.
    pub predicted_cos: f64,
}

/// Squared-distance estimate for a unit pair at each angle of `grid`.
pub fn theta_sweep(
    n: usize,
    grid: &[f64],
    m: usize,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SweepRecord>> {
    grid.iter()
        .map(|&theta| {
            let (x, y) = planar_pair(n, theta)?;
            let geom = PairGeometry::unit(theta)?;
            let est = estimators::mc_sq_dist(&x, &y, m, trials, master_seed)?;
            Ok(SweepRecord::new(&geom, m, trials, est, None))
        })
        .collect()
}

/// For each width in `m_list`, the deviation of single realizations from
/// the corrected expectation at angle `theta`.
pub fn concentration_sweep(
    n: usize,
    m_list: &[usize],
    theta: f64,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SweepRecord>> {
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "m_list",
            reason: "widths must be strictly increasing".into(),
        });
    }
    if trials < 2 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: format!("need at least 2 trials, got {trials}"),
        });
    }
    let (x, y) = planar_pair(n, theta)?;
    let geom = PairGeometry::unit(theta)?;
    let target = geometry::expected_sq_dist(&geom, Claim::Corrected).value;
    m_list
        .iter()
        .map(|&m| {
            let values = estimators::sq_dist_realizations(&x, &y, m, trials, master_seed)?;
            let mut ss = 0.0;
            let mut max: f64 = 0.0;
            for v in &values {
                let d = v - target;
                ss += d * d;
                max = max.max(d.abs());
            }
            let deviation = DeviationStats {
                rms: (ss / values.len() as f64).sqrt(),
                max,
            };
            let est = MomentEstimate::from_samples(&values, master_seed);
            Ok(SweepRecord::new(&geom, m, trials, est, Some(deviation)))
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// points or when every `x` coincides.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slope of RMS deviation against width over a concentration sweep.
pub fn concentration_slope(records: &[SweepRecord]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.deviation.map(|d| (r.m as f64, d.rms)))
        .collect();
    loglog_slope(&pts)
}

/// Output-cosine estimate of a single layer at each angle of `grid`.
pub fn angle_sweep(
    n: usize,
    grid: &[f64],
    m: usize,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<AngleRecord>> {
    grid.iter()
        .map(|&theta| {
            let (x, y) = planar_pair(n, theta)?;
            let c = estimators::mc_output_cos(&x, &y, m, trials, master_seed)?;
            Ok(AngleRecord {
                theta,
                depth: 1,
                m,
                trials,
                empirical: c.estimate,
                degenerate_trials: c.degenerate_trials,
                predicted_cos: geometry::expected_output_cos(theta)?,
            })
        })
        .collect()
}

/// Output cosine after each depth `0..=widths.len()` of a ReLU network
/// with layer widths `widths`, against the iterated angle map.
pub fn depth_sweep(
    n: usize,
    theta: f64,
    widths: &[usize],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<AngleRecord>> {
    if trials < 2 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: format!("need at least 2 trials, got {trials}"),
        });
    }
    if widths.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "widths",
            reason: "every layer needs at least one row".into(),
        });
    }
    let (x, y) = planar_pair(n, theta)?;
    let depth = widths.len();

    // cosines[t][k] is the output cosine of trial t after k + 1 layers
    let cosines: Vec<Vec<Option<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = rng::derive_seed(master_seed, t as u64);
            let (mut a, mut b) = (x.clone(), y.clone());
            let mut input = n;
            let mut out = Vec::with_capacity(depth);
            for (k, &w) in widths.iter().enumerate() {
                let layer = ImplicitLayer::new(input, w, rng::derive_seed(trial_seed, k as u64))?;
                (a, b) = layer.relu_forward_pair(&a, &b)?;
                input = w;
                out.push(cosine(&a, &b));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(depth + 1);
    records.push(AngleRecord {
        theta,
        depth: 0,
        m: n,
        trials,
        empirical: MomentEstimate {
            mean: theta.cos(),
            stderr: 0.0,
            trials,
            master_seed,
        },
        degenerate_trials: 0,
        predicted_cos: theta.cos(),
    });
    for k in 0..depth {
        let values: Vec<f64> = cosines.iter().filter_map(|c| c[k]).collect();
        if values.is_empty() {
            return Err(Error::AllTrialsDegenerate { trials });
        }
        records.push(AngleRecord {
            theta,
            depth: k + 1,
            m: widths[k],
            trials,
            empirical: MomentEstimate::from_samples(&values, master_seed),
            degenerate_trials: trials - values.len(),
            predicted_cos: geometry::iterated_output_cos(theta, k + 1)?,
        });
    }
    Ok(records)
}

/// Parameters of the synthetic angle-separated classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassConfig {
    pub ambient_dim: usize,
    pub classes: usize,
    pub points_per_class: usize,
    /// Largest angle between a point and its class center.
    pub intra_angle_max: f64,
    /// Smallest angle between two class centers.
    pub inter_angle_min: f64,
    pub master_seed: u64,
}

impl ClassConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if self.ambient_dim == 0 {
            return invalid("ambient_dim", "must be positive");
        }
        if self.classes == 0 {
            return invalid("classes", "must be positive");
        }
        if self.points_per_class == 0 {
            return invalid("points_per_class", "must be positive");
        }
        if !(self.intra_angle_max > 0.0
            && self.intra_angle_max < self.inter_angle_min
            && self.inter_angle_min <= std::f64::consts::PI)
        {
            return invalid(
                "intra_angle_max/inter_angle_min",
                "need 0 < intra_angle_max < inter_angle_min <= pi",
            );
        }
        Ok(())
    }
}

/// Unit-norm points with class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoints {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
}

/// Cap on center placement attempts.
pub const MAX_CENTER_ATTEMPTS: usize = 100_000;

fn random_unit(stream: &mut Stream, n: usize) -> Vec<f64> {
    loop {
        let g = stream.normal_vec(n);
        let r = geometry::norm(&g);
        if r > 1e-12 {
            return g.into_iter().map(|v| v / r).collect();
        }
    }
}

/// Random unit vector orthogonal to the unit vector `c`; `None` when the
/// draws keep landing on `c`'s span (only possible for `n = 1`).
fn random_orthogonal_unit(stream: &mut Stream, c: &[f64]) -> Option<Vec<f64>> {
    for _ in 0..64 {
        let mut g = stream.normal_vec(c.len());
        let proj = geometry::dot(&g, c);
        g.iter_mut().zip(c).for_each(|(v, ci)| *v -= proj * ci);
        let r = geometry::norm(&g);
        if r > 1e-9 {
            return Some(g.into_iter().map(|v| v / r).collect());
        }
    }
    None
}

/// Spherical interpolation between unit vectors `a` and `b` at fraction `t`.
pub fn slerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    let omega = geometry::dot(a, b).clamp(-1.0, 1.0).acos();
    if omega < 1e-12 {
        return a.to_vec();
    }
    let s = omega.sin();
    let (wa, wb) = (((1.0 - t) * omega).sin() / s, (t * omega).sin() / s);
    a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
}

fn angle_of_units(a: &[f64], b: &[f64]) -> f64 {
    geometry::dot(a, b).clamp(-1.0, 1.0).acos()
}

/// Draws class centers by greedy rejection and places each point at a
/// uniform angle in `[0, intra_angle_max]` from its center along a random
/// orthogonal direction.
pub fn generate_classes(config: &ClassConfig) -> Result<LabeledPoints> {
    config.validate()?;
    let n = config.ambient_dim;
    if n < 2 {
        return Err(Error::InfeasibleGeometry(
            "ambient dimension 1 has no direction orthogonal to a center".into(),
        ));
    }
    let mut centers_rng = Stream::new(config.master_seed, 0);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(config.classes);
    let mut attempts = 0usize;
    while centers.len() < config.classes {
        if attempts == MAX_CENTER_ATTEMPTS {
            return Err(Error::InfeasibleGeometry(format!(
                "placed {} of {} centers at pairwise angle >= {:.4} rad in R^{} after {} attempts",
                centers.len(),
                config.classes,
                config.inter_angle_min,
                n,
                attempts
            )));
        }
        attempts += 1;
        let c = random_unit(&mut centers_rng, n);
        if centers
            .iter()
            .all(|o| angle_of_units(o, &c) >= config.inter_angle_min)
        {
            centers.push(c);
        }
    }

    let mut points_rng = Stream::new(config.master_seed, 1);
    let mut points = Vec::with_capacity(config.classes * config.points_per_class);
    let mut labels = Vec::with_capacity(points.capacity());
    for (label, c) in centers.iter().enumerate() {
        for _ in 0..config.points_per_class {
            let w = random_orthogonal_unit(&mut points_rng, c).ok_or_else(|| {
                Error::InfeasibleGeometry("no direction orthogonal to the center".into())
            })?;
            let alpha = config.intra_angle_max * points_rng.uniform();
            points.push(slerp(c, &w, alpha / std::f64::consts::FRAC_PI_2));
            labels.push(label);
        }
    }
    Ok(LabeledPoints {
        points,
        labels,
        centers,
    })
}

/// Distance statistics of one pair group; every field is `None` when the
/// group has no pairs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupStats {
    pub pairs: usize,
    pub mean_pre: Option<f64>,
    pub mean_post: Option<f64>,
    pub min_pre: Option<f64>,
    pub min_post: Option<f64>,
    pub max_pre: Option<f64>,
    pub max_post: Option<f64>,
    /// Mean over pairs of `E‖Δout‖² / ‖Δin‖²`.
    pub mean_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub m: usize,
    pub layers: usize,
    pub trials: usize,
    pub intra: GroupStats,
    pub inter: GroupStats,
}

impl SeparationReport {
    /// `ratio(inter) < ratio(intra) − margin`; `None` if either group is empty.
    pub fn inter_shrinks_more(&self, margin: f64) -> Option<bool> {
        Some(self.inter.mean_ratio? < self.intra.mean_ratio? - margin)
    }
}

struct PairSample {
    pre_sq: f64,
    post_sq: f64,
}

fn group_stats(samples: &[PairSample]) -> GroupStats {
    if samples.is_empty() {
        return GroupStats::default();
    }
    let k = samples.len() as f64;
    let pre: Vec<f64> = samples.iter().map(|s| s.pre_sq.sqrt()).collect();
    let post: Vec<f64> = samples.iter().map(|s| s.post_sq.sqrt()).collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ratios: Vec<f64> = samples
        .iter()
        .filter(|s| s.pre_sq > 0.0)
        .map(|s| s.post_sq / s.pre_sq)
        .collect();
    GroupStats {
        pairs: samples.len(),
        mean_pre: Some(pre.iter().sum::<f64>() / k),
        mean_post: Some(post.iter().sum::<f64>() / k),
        min_pre: Some(min(&pre)),
        min_post: Some(min(&post)),
        max_pre: Some(max(&pre)),
        max_post: Some(max(&post)),
        mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
    }
}

/// Pre- and post-network distance statistics of a labeled point set,
/// grouped into same-label (intra) and different-label (inter) pairs
/// `i < j`. Post-network squared distances are averaged over `trials`
/// independent networks of `layers` layers of width `m`.
pub fn separation_from_points(
    data: &LabeledPoints,
    m: usize,
    layers: usize,
    trials: usize,
    master_seed: u64,
) -> Result<SeparationReport> {
    if layers == 0 {
        return Err(Error::InvalidParameter {
            name: "layers",
            reason: "need at least one layer".into(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "need at least one trial".into(),
        });
    }
    let pts = &data.points;
    if pts.len() != data.labels.len() {
        return Err(Error::DimensionMismatch {
            expected: pts.len(),
            actual: data.labels.len(),
        });
    }
    let n = pts.first().map_or(1, Vec::len);
    let pairs: Vec<(usize, usize)> = (0..pts.len())
        .flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j)))
        .collect();
    let widths = vec![m; layers];

    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let stack = LayerStack::sample(n, &widths, rng::derive_seed(master_seed, t as u64))?;
            let out: Vec<Vec<f64>> = pts.iter().map(|p| stack.forward(p)).collect::<Result<_>>()?;
            Ok(pairs
                .iter()
                .map(|&(i, j)| geometry::sq_dist(&out[i], &out[j]))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut post = vec![0.0; pairs.len()];
    for trial in &per_trial {
        for (acc, v) in post.iter_mut().zip(trial) {
            *acc += v;
        }
    }
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let sample = PairSample {
            pre_sq: geometry::sq_dist(&pts[i], &pts[j]),
            post_sq: post[k] / trials as f64,
        };
        if data.labels[i] == data.labels[j] {
            intra.push(sample);
        } else {
            inter.push(sample);
        }
    }
    Ok(SeparationReport {
        m,
        layers,
        trials,
        intra: group_stats(&intra),
        inter: group_stats(&inter),
    })
}

/// Generates classes from `config` and runs [`separation_from_points`].
pub fn separation_experiment(
    config: &ClassConfig,
    m: usize,
    layers: usize,
    trials: usize,
    master_seed: u64,
) -> Result<SeparationReport> {
    let data = generate_classes(config)?;
    separation_from_points(&data, m, layers, trials, master_seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{angle_grid, unit_shrinkage_ratio};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn zero_angle_sweep_is_all_zero() {
        let r = theta_sweep(8, &[0.0], 64, 4, 0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].empirical.mean, 0.0);
        assert_eq!((r[0].analytic_corrected, r[0].analytic_original), (0.0, 0.0));
    }

    #[test]
    fn antipodal_sweep_point() {
        let r = theta_sweep(64, &[PI], 1024, 400, 0).unwrap();
        assert!(r[0].empirical.within(1.0, 4.0));
        assert!((r[0].analytic_original - 3.0).abs() < 1e-15);
        assert_eq!((r[0].bound_lower, r[0].bound_upper), (1.0, 2.0));
    }

    #[test]
    fn full_sweep_tracks_corrected() {
        let grid = angle_grid(181);
        let recs = theta_sweep(64, &grid, 4096, 100, 0).unwrap();
        let mut worst = 0.0f64;
        let mut nearest_original = f64::INFINITY;
        for r in &recs {
            assert!(r.bound_lower <= r.analytic_corrected && r.analytic_corrected <= r.bound_upper);
            let d = (r.empirical.mean - r.analytic_corrected).abs();
            assert!(d <= 4.0 * r.empirical.stderr + 1e-12, "theta {}: {:?}", r.theta, r);
            worst = worst.max(d);
            // the analytic gap 2ψ(θ) only exceeds 0.1 from about 46°
            if r.theta >= 50f64.to_radians() {
                nearest_original = nearest_original.min((r.empirical.mean - r.analytic_original).abs());
            }
        }
        assert!(worst <= 0.02, "{worst}");
        assert!(nearest_original >= 0.1, "{nearest_original}");
    }

    #[test]
    fn sweep_means_increase_with_angle() {
        let grid = angle_grid(13);
        let recs = theta_sweep(16, &grid, 1024, 100, 3).unwrap();
        for w in recs.windows(2) {
            assert!(w[1].analytic_corrected > w[0].analytic_corrected);
            assert!(w[1].empirical.mean >= w[0].empirical.mean - 4.0 * w[1].empirical.stderr);
        }
        for r in &recs {
            if r.theta >= FRAC_PI_4 {
                assert!(r.empirical.z_score(r.analytic_original).abs() >= 10.0);
            }
        }
        let ratios: Vec<f64> = angle_grid(181).iter().map(|&t| unit_shrinkage_ratio(t).unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn concentration_improves_with_width() {
        let recs = concentration_sweep(8, &[64, 4096], FRAC_PI_2, 100, 0).unwrap();
        let rms: Vec<f64> = recs.iter().map(|r| r.deviation.unwrap().rms).collect();
        assert!(rms[1] < rms[0], "{rms:?}");
        assert!(recs.iter().all(|r| r.deviation.unwrap().max >= r.deviation.unwrap().rms));
    }

    #[test]
    fn single_width_has_no_slope() {
        let recs = concentration_sweep(4, &[128], FRAC_PI_2, 10, 0).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(concentration_slope(&recs), None);
    }

    #[test]
    fn concentration_rejects_unsorted_widths() {
        assert!(concentration_sweep(4, &[128, 64], 1.0, 10, 0).is_err());
        assert!(concentration_sweep(4, &[64, 64], 1.0, 10, 0).is_err());
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 3.0 / (k as f64).sqrt())).collect();
        assert!((loglog_slope(&pts).unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&[(2.0, 1.0), (2.0, 3.0)]), None);
    }

    #[test]
    fn concentration_slope_near_minus_half() {
        let m_list: Vec<usize> = (6..=13).map(|k| 1usize << k).collect();
        let recs = concentration_sweep(8, &m_list, FRAC_PI_2, 200, 0).unwrap();
        let slope = concentration_slope(&recs).unwrap();
        assert!((-0.6..=-0.4).contains(&slope), "{slope}");
    }

    fn two_class_config() -> ClassConfig {
        ClassConfig {
            ambient_dim: 3,
            classes: 2,
            points_per_class: 10,
            intra_angle_max: 0.1,
            inter_angle_min: FRAC_PI_2,
            master_seed: 4,
        }
    }

    #[test]
    fn generated_classes_respect_angles() {
        let d = generate_classes(&two_class_config()).unwrap();
        assert_eq!(d.points.len(), 20);
        assert!(angle_of_units(&d.centers[0], &d.centers[1]) >= FRAC_PI_2);
        for (p, &l) in d.points.iter().zip(&d.labels) {
            assert!((geometry::norm(p) - 1.0).abs() < 1e-12);
            assert!(angle_of_units(p, &d.centers[l]) <= 0.1 + 1e-12);
        }
    }

    #[test]
    fn one_class_is_feasible() {
        let cfg = ClassConfig {
            classes: 1,
            ..two_class_config()
        };
        let d = generate_classes(&cfg).unwrap();
        assert_eq!(d.centers.len(), 1);
        assert!(d.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn too_many_classes_is_infeasible() {
        let cfg = ClassConfig {
            classes: 40,
            ..two_class_config()
        };
        assert!(matches!(generate_classes(&cfg), Err(Error::InfeasibleGeometry(_))));
    }

    #[test]
    fn class_config_validation() {
        let bad = ClassConfig {
            intra_angle_max: 2.0,
            ..two_class_config()
        };
        assert!(matches!(generate_classes(&bad), Err(Error::InvalidParameter { .. })));
        let line = ClassConfig {
            ambient_dim: 1,
            ..two_class_config()
        };
        assert!(matches!(generate_classes(&line), Err(Error::InfeasibleGeometry(_))));
    }

    #[test]
    fn slerp_endpoints_and_midpoint() {
        let a = [1.0, 0.0];
        let b = [0.0, 1.0];
        assert_eq!(slerp(&a, &b, 0.0), vec![1.0, 0.0]);
        let e = slerp(&a, &b, 1.0);
        assert!(e[0].abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
        let mid = slerp(&a, &b, 0.5);
        assert!((angle_of_units(&mid, &a) - FRAC_PI_4).abs() < 1e-15);
    }

    fn headline_config() -> ClassConfig {
        ClassConfig {
            ambient_dim: 64,
            classes: 2,
            points_per_class: 20,
            intra_angle_max: 15f64.to_radians(),
            inter_angle_min: 60f64.to_radians(),
            master_seed: 0,
        }
    }

    #[test]
    fn inter_class_pairs_shrink_more() {
        let rep = separation_experiment(&headline_config(), 2048, 1, 50, 0).unwrap();
        assert_eq!(rep.intra.pairs, 2 * 190);
        assert_eq!(rep.inter.pairs, 400);
        assert_eq!(rep.inter_shrinks_more(0.02), Some(true), "{rep:?}");
        for g in [rep.intra, rep.inter] {
            let r = g.mean_ratio.unwrap();
            assert!((0.23..=0.52).contains(&r), "{r}");
        }
        // nearest cross-class points move closer together in absolute terms
        assert!(rep.inter.min_post.unwrap() < rep.inter.min_pre.unwrap());
    }

    #[test]
    fn swapped_grouping_reverses_inequality() {
        let cfg = ClassConfig {
            points_per_class: 6,
            ..headline_config()
        };
        let mut data = generate_classes(&cfg).unwrap();
        let honest = separation_from_points(&data, 512, 1, 10, 1).unwrap();
        assert_eq!(honest.inter_shrinks_more(0.0), Some(true));
        // label by position within the class: same-label pairs now straddle clusters
        data.labels = (0..data.points.len()).map(|k| k % cfg.points_per_class).collect();
        let swapped = separation_from_points(&data, 512, 1, 10, 1).unwrap();
        assert!(swapped.intra.mean_ratio.unwrap() < swapped.inter.mean_ratio.unwrap());
    }

    #[test]
    fn degenerate_groups_are_absent() {
        let cfg = ClassConfig {
            classes: 1,
            points_per_class: 1,
            ..headline_config()
        };
        let rep = separation_experiment(&cfg, 64, 1, 3, 0).unwrap();
        assert_eq!(rep.intra, GroupStats::default());
        assert_eq!(rep.inter, GroupStats::default());
        assert_eq!(rep.inter_shrinks_more(0.0), None);
    }

    #[test]
    fn depth_zero_and_one() {
        let recs = depth_sweep(8, PI, &[1024], 20, 0).unwrap();
        assert_eq!(recs[0].empirical.mean, -1.0);
        assert_eq!(recs[0].predicted_cos, -1.0);
        assert!(recs[1].predicted_cos.abs() < 1e-15);
        // supports of ρ(Mx) and ρ(−Mx) are disjoint, so every trial gives exactly 0
        assert_eq!(recs[1].empirical.mean, 0.0);
    }

    #[test]
    fn depth_five_tracks_iterated_map() {
        let recs = depth_sweep(64, PI, &[4096; 5], 4, 0).unwrap();
        assert_eq!(recs.len(), 6);
        for w in recs.windows(2) {
            assert!(w[1].predicted_cos > w[0].predicted_cos);
        }
        for r in &recs {
            assert!((r.empirical.mean - r.predicted_cos).abs() <= 0.05, "{r:?}");
        }
    }

    #[test]
    fn angle_sweep_respects_nonnegative_outputs() {
        let recs = angle_sweep(4, &angle_grid(7), 256, 10, 0).unwrap();
        for r in recs {
            assert!(r.empirical.mean >= 0.0 && r.empirical.mean <= 1.0);
        }
    }

    #[test]
    fn experiments_are_deterministic() {
        let a = separation_experiment(&headline_config(), 64, 2, 3, 9).unwrap();
        let b = separation_experiment(&headline_config(), 64, 2, 3, 9).unwrap();
        assert_eq!(a, b);
    }
}

//! End-to-end acceptance checks, shared by the `acceptance` test target and
//! the `selftest` subcommand.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::time::{Duration, Instant};

use crate::cli::{self, Command, RunConfig};
use crate::error::Result;
use crate::estimators::{self, Thresholds, Verdict};
use crate::experiments::{self, ClassConfig};
use crate::geometry::{self, Claim, PairGeometry};
use crate::layer::GaussianLayer;
use crate::rng::{self, Stream};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed(
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; over the {:.0} s limit", limit.as_secs_f64()));
        }
    }
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed,
    }
}

/// 1. `‖ρ(Mx) − ρ(−Mx)‖² = ‖Mx‖²` for 100 seeded draws.
pub fn antipodal_identity() -> CriterionResult {
    timed(1, "antipodal identity", Some(Duration::from_secs(5)), || {
        let (n, m) = (64, 1024);
        let mut worst = 0.0f64;
        for t in 0..100u64 {
            let seed = rng::derive_seed(1, t);
            let layer = GaussianLayer::sample(n, m, seed)?;
            let x = Stream::new(seed, 1).normal_vec(n);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let lhs = layer.sq_dist_realization(&x, &neg)?;
            let mx = layer.linear(&x)?;
            let rhs: f64 = mx.iter().map(|v| v * v).sum();
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
        let g = PairGeometry::unit(PI)?;
        let corrected = geometry::expected_sq_dist(&g, Claim::Corrected).value;
        let original = geometry::expected_sq_dist(&g, Claim::OriginalClaim).value;
        let ok = worst <= 1e-12 && (corrected - 1.0).abs() < 1e-15 && (original - 3.0).abs() < 1e-15;
        Ok((
            ok,
            format!("max relative error {worst:.2e}; corrected {corrected}, original {original}"),
        ))
    })
}

/// 2. Unit orthogonal pair: the estimate sits near `1 − 1/π`, far from `1 + 1/π`.
pub fn orthogonal_discrimination() -> CriterionResult {
    timed(2, "orthogonal pair discrimination", Some(Duration::from_secs(10)), || {
        let (x, y) = experiments::planar_pair(64, FRAC_PI_2)?;
        let v = estimators::refutation_test(&x, &y, 1024, 400, 0, Thresholds::default())?;
        let se = v.estimate.stderr;
        let d_corr = (v.estimate.mean - (1.0 - 1.0 / PI)).abs();
        let d_orig = (v.estimate.mean - (1.0 + 1.0 / PI)).abs();
        let ok = d_corr <= 4.0 * se && d_orig >= 10.0 * se && v.verdict == Verdict::SupportsCorrected;
        Ok((
            ok,
            format!(
                "mean {:.6} ± {:.2e}; {:.2}σ from corrected, {:.1}σ from original; {}",
                v.estimate.mean,
                se,
                d_corr / se,
                d_orig / se,
                v.verdict.name()
            ),
        ))
    })
}

/// 3. Closed form, quadrature and planar Monte Carlo of the cross term agree.
pub fn cross_term_agreement() -> CriterionResult {
    timed(3, "cross-term triple agreement", None, || {
        let mut worst_quad = 0.0f64;
        let mut worst_z = 0.0f64;
        for k in 0..7 {
            let theta = k as f64 * PI / 6.0;
            let closed = geometry::cross_integral_closed_form(theta);
            worst_quad = worst_quad.max((estimators::quadrature_cross_integral(theta)? - closed).abs());
            // ρ(g·u)ρ(g·v) has mean ½(cos θ + ψ) = closed / π
            let mc = estimators::cross_term_mc_2d(theta, 100_000, 3 + k as u64)?;
            worst_z = worst_z.max(mc.z_score(closed / PI).abs());
        }
        Ok((
            worst_quad <= 1e-9 && worst_z <= 4.0,
            format!("max quadrature error {worst_quad:.2e}; max Monte Carlo |z| {worst_z:.2}"),
        ))
    })
}

/// 4. Output cosine follows `cos θ + ψ(θ)` on a 181-point grid.
pub fn angle_law() -> CriterionResult {
    timed(4, "angle law", None, || {
        let (n, m, trials) = (64, 4096, 100);
        let mut sup = 0.0f64;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for theta in geometry::angle_grid(181) {
            let (x, y) = experiments::planar_pair(n, theta)?;
            let per_trial = estimators::output_cos_realizations(&x, &y, m, trials, 4)?;
            let values: Vec<f64> = per_trial.iter().flatten().copied().collect();
            for &c in &values {
                lo = lo.min(c);
                hi = hi.max(c);
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            sup = sup.max((mean - geometry::expected_output_cos(theta)?).abs());
        }
        Ok((
            sup <= 0.02 && lo >= -0.02 && hi <= 1.0,
            format!("sup deviation {sup:.4}; per-trial cosine range [{lo:.4}, {hi:.4}]"),
        ))
    })
}

fn ball_point(s: &mut Stream, n: usize) -> Vec<f64> {
    let dir = s.normal_vec(n);
    let r = s.uniform().powf(1.0 / n as f64) / geometry::norm(&dir);
    dir.into_iter().map(|v| v * r).collect()
}

/// 5. Analytic and Monte Carlo values stay inside `[¼d², ½d²]`.
pub fn envelope() -> CriterionResult {
    timed(5, "distance envelope", None, || {
        let (n, m, trials) = (8, 512, 100);
        let mut s = Stream::new(5, 0);
        let mut analytic_ok = true;
        let mut mc_ok = true;
        let mut worst_excess = f64::NEG_INFINITY;
        for k in 0..100u64 {
            let x = ball_point(&mut s, n);
            let y = ball_point(&mut s, n);
            let g = geometry::angle_between(&x, &y)?;
            let (lo, hi) = geometry::shrinkage_bounds(&g);
            let a = geometry::expected_sq_dist(&g, Claim::Corrected).value;
            analytic_ok &= lo <= a && a <= hi;
            let est = estimators::mc_sq_dist(&x, &y, m, trials, rng::derive_seed(5, k))?;
            let slack = 3.0 * est.stderr;
            let excess = (lo - est.mean).max(est.mean - hi) - slack;
            worst_excess = worst_excess.max(excess);
            mc_ok &= excess <= 0.0;
        }
        Ok((
            analytic_ok && mc_ok,
            format!("analytic inside: {analytic_ok}; worst Monte Carlo excess over 3σ-widened envelope {worst_excess:.3e}"),
        ))
    })
}

/// 6. Unit shrinkage ratio decreases strictly from ½ to ¼.
pub fn shrinkage_monotone() -> CriterionResult {
    timed(6, "shrinkage monotonicity", None, || {
        let grid = geometry::angle_grid(181);
        let ratios = grid
            .iter()
            .map(|&t| geometry::unit_shrinkage_ratio(t))
            .collect::<Result<Vec<f64>>>()?;
        let strict = ratios.windows(2).all(|w| w[1] < w[0]);
        let (first, last) = (ratios[0], ratios[ratios.len() - 1]);
        Ok((
            strict && (first - 0.5).abs() <= 1e-9 && (last - 0.25).abs() <= 1e-9,
            format!("strictly decreasing: {strict}; endpoints {first} and {last}"),
        ))
    })
}

/// 7. RMS deviation of single realizations decays like `m^{-1/2}`.
pub fn concentration() -> CriterionResult {
    timed(7, "concentration scaling", Some(Duration::from_secs(60)), || {
        let m_list: Vec<usize> = (6..=13).map(|k| 1usize << k).collect();
        let recs = experiments::concentration_sweep(64, &m_list, FRAC_PI_2, 200, 7)?;
        let slope = experiments::concentration_slope(&recs).unwrap_or(f64::NAN);
        Ok(((-0.6..=-0.4).contains(&slope), format!("log-log slope {slope:.4}")))
    })
}

/// 8. Inter-class pairs shrink more than intra-class pairs.
pub fn class_separation() -> CriterionResult {
    timed(8, "class separation", None, || {
        let config = ClassConfig {
            ambient_dim: 64,
            classes: 2,
            points_per_class: 20,
            intra_angle_max: 15f64.to_radians(),
            inter_angle_min: 60f64.to_radians(),
            master_seed: 8,
        };
        let rep = experiments::separation_experiment(&config, 2048, 1, 50, 8)?;
        let intra = rep.intra.mean_ratio.unwrap_or(f64::NAN);
        let inter = rep.inter.mean_ratio.unwrap_or(f64::NAN);
        let range = 0.23..=0.52;
        let ok = inter < intra - 0.02 && range.contains(&intra) && range.contains(&inter);
        Ok((ok, format!("mean ratio intra {intra:.4}, inter {inter:.4}")))
    })
}

/// 9. Mean width of `{e₁, e₂}` is `2/√π`.
pub fn mean_width() -> CriterionResult {
    timed(9, "mean width", None, || {
        let points = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let est = estimators::mean_width_estimate(&points, 100_000, 9)?;
        let target = 2.0 / PI.sqrt();
        let z = est.z_score(target);
        Ok((z.abs() <= 4.0, format!("estimate {:.6} ± {:.2e}; z {z:.2}", est.mean, est.stderr)))
    })
}

fn render_with_threads(config: &RunConfig, threads: usize) -> std::result::Result<String, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    pool.install(|| {
        cli::execute(config)
            .map(|o| cli::render(config, &o.document))
            .map_err(|e| e.to_string())
    })
}

/// Configurations exercised by the determinism check.
pub fn determinism_configs() -> Vec<RunConfig> {
    let base = RunConfig {
        format: cli::Format::Json,
        seed: 10,
        ..RunConfig::default()
    };
    vec![
        RunConfig {
            command: Command::ThetaSweep,
            grid: 13,
            m: 256,
            trials: 40,
            ..base.clone()
        },
        RunConfig {
            command: Command::Refute,
            ..base.clone()
        },
        RunConfig {
            command: Command::Concentration,
            m_list: Some(vec![64, 128, 256]),
            trials: 30,
            ..base.clone()
        },
        RunConfig {
            command: Command::Separate,
            m: 128,
            trials: 4,
            points_per_class: 6,
            layers: 2,
            ..base.clone()
        },
        RunConfig {
            command: Command::Depth,
            m: 256,
            layers: 3,
            trials: 20,
            ..base
        },
    ]
}

/// 10. Identical configs give byte-identical payloads on 1 and 4 threads.
pub fn determinism() -> CriterionResult {
    timed(10, "determinism across thread counts", None, || {
        let mut mismatched = Vec::new();
        let configs = determinism_configs();
        for c in &configs {
            let one = render_with_threads(c, 1);
            let four = render_with_threads(c, 4);
            let again = render_with_threads(c, 4);
            match (one, four, again) {
                (Ok(a), Ok(b), Ok(c2)) if a == b && b == c2 => {}
                _ => mismatched.push(format!("{:?}", c.command)),
            }
        }
        Ok((
            mismatched.is_empty(),
            if mismatched.is_empty() {
                format!("{} configurations byte-identical", configs.len())
            } else {
                format!("differing payloads: {}", mismatched.join(", "))
            },
        ))
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        antipodal_identity(),
        orthogonal_discrimination(),
        cross_term_agreement(),
        angle_law(),
        envelope(),
        shrinkage_monotone(),
        concentration(),
        class_separation(),
        mean_width(),
        determinism(),
    ]
}

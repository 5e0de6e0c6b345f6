//! Command-line front end.
//!
//! Each subcommand validates a [`RunConfig`], runs one library operation
//! and writes a report as CSV (default) or JSON. Exit codes: 0 success,
//! 1 invalid arguments, 2 runtime failure, 3 when `refute` does not
//! support the corrected formula.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::acceptance;
use crate::error::Error;
use crate::estimators::{self, Thresholds, Verdict};
use crate::experiments::{self, ClassConfig, SweepRecord};
use crate::geometry::{self, Claim, PairGeometry};
use crate::report::{self, Cell, ReportDocument, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_NOT_CORRECTED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Psi,
    Expect,
    Mc,
    Refute,
    ThetaSweep,
    Concentration,
    Angle,
    Separate,
    Depth,
    Meanwidth,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ClaimChoice {
    Corrected,
    Original,
    #[default]
    Both,
}

/// Every parameter of a run. Angles are radians unless `deg` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub m: usize,
    pub theta: Option<f64>,
    pub deg: bool,
    pub trials: usize,
    pub layers: usize,
    pub grid: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub z_accept: f64,
    pub z_reject: f64,
    pub claim: ClaimChoice,
    pub norm_x: f64,
    pub norm_y: f64,
    pub m_list: Option<Vec<usize>>,
    pub classes: usize,
    pub points_per_class: usize,
    pub intra: f64,
    pub inter: f64,
    pub samples: usize,
    pub points: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Psi,
            n: 64,
            m: 1024,
            theta: None,
            deg: false,
            trials: 400,
            layers: 1,
            grid: 181,
            seed: 0,
            out: None,
            format: Format::Csv,
            z_accept: 4.0,
            z_reject: 10.0,
            claim: ClaimChoice::Both,
            norm_x: 1.0,
            norm_y: 1.0,
            m_list: None,
            classes: 2,
            points_per_class: 20,
            intra: 15f64.to_radians(),
            inter: 60f64.to_radians(),
            samples: 100_000,
            points: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "relu-distortion",
    version,
    about = "Distance and angle distortion of random Gaussian ReLU layers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// ψ(θ) and the other closed-form curves, at one angle or on a grid
    Psi(Flags),
    /// Expected squared output distance under either formula
    Expect(Flags),
    /// Monte Carlo estimate of the expected squared output distance
    Mc(Flags),
    /// z-score test of the corrected formula against the original claim
    Refute(Flags),
    /// Distance estimates over an angle grid
    ThetaSweep(Flags),
    /// Deviation of single realizations as the width grows
    Concentration(Flags),
    /// Output-angle cosine against cos θ + ψ(θ)
    Angle(Flags),
    /// Synthetic class-separation study
    Separate(Flags),
    /// Output-angle cosine across depth against the iterated angle map
    Depth(Flags),
    /// Gaussian mean width of a finite point set
    Meanwidth(Flags),
    /// Run the acceptance checks
    Selftest(Flags),
}

impl CliCommand {
    fn split(self) -> (Command, Flags) {
        match self {
            CliCommand::Psi(f) => (Command::Psi, f),
            CliCommand::Expect(f) => (Command::Expect, f),
            CliCommand::Mc(f) => (Command::Mc, f),
            CliCommand::Refute(f) => (Command::Refute, f),
            CliCommand::ThetaSweep(f) => (Command::ThetaSweep, f),
            CliCommand::Concentration(f) => (Command::Concentration, f),
            CliCommand::Angle(f) => (Command::Angle, f),
            CliCommand::Separate(f) => (Command::Separate, f),
            CliCommand::Depth(f) => (Command::Depth, f),
            CliCommand::Meanwidth(f) => (Command::Meanwidth, f),
            CliCommand::Selftest(f) => (Command::Selftest, f),
        }
    }
}

/// Flags shared by every subcommand; unset flags fall back to `--config`,
/// then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with RunConfig fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input dimension
    #[arg(long)]
    pub n: Option<usize>,
    /// Layer width
    #[arg(long)]
    pub m: Option<usize>,
    /// Pair angle (radians, or degrees with --deg)
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Read every angle flag in degrees
    #[arg(long)]
    pub deg: bool,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Points of the angle grid on [0, π]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub z_accept: Option<f64>,
    #[arg(long)]
    pub z_reject: Option<f64>,
    #[arg(long, value_enum)]
    pub claim: Option<ClaimChoice>,
    #[arg(long, allow_hyphen_values = true)]
    pub norm_x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub norm_y: Option<f64>,
    /// Comma-separated widths for `concentration`
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long)]
    pub points_per_class: Option<usize>,
    /// Largest point-to-center angle within a class
    #[arg(long)]
    pub intra: Option<f64>,
    /// Smallest angle between class centers
    #[arg(long)]
    pub inter: Option<f64>,
    /// Gaussian samples for `meanwidth`
    #[arg(long)]
    pub samples: Option<usize>,
    /// CSV file of points for `meanwidth`, one vector per line
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
pub enum RunError {
    Invalid(String),
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => EXIT_INVALID,
            RunError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Invalid(m) => write!(f, "invalid arguments: {m}"),
            RunError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Domain { .. } => RunError::Invalid(e.to_string()),
            other => RunError::Runtime(other.to_string()),
        }
    }
}

fn invalid(flag: &str, reason: impl std::fmt::Display) -> RunError {
    RunError::Invalid(format!("--{flag}: {reason}"))
}

impl RunConfig {
    /// Builds the config for `command` from an optional config file and flags.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self, RunError> {
        let mut c = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text).map_err(|e| invalid("config", e))?
            }
            None => RunConfig::default(),
        };
        c.command = command;
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = flags.$field.clone() {
                    c.$field = v;
                }
            )*};
        }
        take!(n, m, trials, layers, grid, seed, format, z_accept, z_reject, claim, norm_x, norm_y);
        take!(classes, points_per_class, intra, inter, samples);
        if flags.theta.is_some() {
            c.theta = flags.theta;
        }
        if flags.out.is_some() {
            c.out = flags.out.clone();
        }
        if flags.m_list.is_some() {
            c.m_list = flags.m_list.clone();
        }
        if flags.points.is_some() {
            c.points = flags.points.clone();
        }
        c.deg |= flags.deg;
        c.validate()?;
        Ok(c)
    }

    fn to_radians(&self, v: f64) -> f64 {
        if self.deg {
            v.to_radians()
        } else {
            v
        }
    }

    /// `--theta` in radians, or `default` when unset.
    pub fn theta_rad(&self, default: f64) -> f64 {
        self.theta.map_or(default, |t| self.to_radians(t))
    }

    pub fn intra_rad(&self) -> f64 {
        self.to_radians(self.intra)
    }

    pub fn inter_rad(&self) -> f64 {
        self.to_radians(self.inter)
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            z_accept: self.z_accept,
            z_reject: self.z_reject,
        }
    }

    /// Checks every numeric parameter before any computation starts.
    pub fn validate(&self) -> Result<(), RunError> {
        if self.n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let planar = matches!(
            self.command,
            Command::Mc
                | Command::Refute
                | Command::ThetaSweep
                | Command::Concentration
                | Command::Angle
                | Command::Depth
                | Command::Separate
        );
        if planar && self.n < 2 {
            return Err(invalid("n", "this subcommand needs at least 2 dimensions"));
        }
        if self.m == 0 {
            return Err(invalid("m", "must be at least 1"));
        }
        if self.trials < 2 {
            return Err(invalid("trials", "must be at least 2"));
        }
        if self.layers == 0 {
            return Err(invalid("layers", "must be at least 1"));
        }
        if self.grid == 0 {
            return Err(invalid("grid", "must be at least 1"));
        }
        if let Some(t) = self.theta {
            let r = self.to_radians(t);
            if !(r.is_finite() && (-geometry::ANGLE_TOLERANCE..=PI + geometry::ANGLE_TOLERANCE).contains(&r)) {
                return Err(invalid("theta", format!("{t} is outside [0, pi] (or [0, 180] with --deg)")));
            }
        }
        if !(self.z_accept.is_finite() && self.z_accept > 0.0) {
            return Err(invalid("z-accept", "must be positive"));
        }
        if !(self.z_reject.is_finite() && self.z_reject > self.z_accept) {
            return Err(invalid("z-reject", "must exceed --z-accept"));
        }
        if !(self.norm_x.is_finite() && self.norm_x > 0.0) {
            return Err(invalid("norm-x", "must be positive"));
        }
        if !(self.norm_y.is_finite() && self.norm_y > 0.0) {
            return Err(invalid("norm-y", "must be positive"));
        }
        if let Some(list) = &self.m_list {
            if list.is_empty() || list.contains(&0) {
                return Err(invalid("m-list", "widths must be positive"));
            }
            if list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("m-list", "widths must be strictly increasing"));
            }
        }
        if self.classes == 0 {
            return Err(invalid("classes", "must be at least 1"));
        }
        if self.points_per_class == 0 {
            return Err(invalid("points-per-class", "must be at least 1"));
        }
        let (intra, inter) = (self.intra_rad(), self.inter_rad());
        if !(intra > 0.0 && intra < inter && inter <= PI + geometry::ANGLE_TOLERANCE) {
            return Err(invalid("intra", "need 0 < intra < inter <= pi"));
        }
        if self.samples < 2 {
            return Err(invalid("samples", "must be at least 2"));
        }
        Ok(())
    }

    fn class_config(&self) -> ClassConfig {
        ClassConfig {
            ambient_dim: self.n,
            classes: self.classes,
            points_per_class: self.points_per_class,
            intra_angle_max: self.intra_rad(),
            inter_angle_min: self.inter_rad().min(PI),
            master_seed: self.seed,
        }
    }

    fn angles(&self) -> Vec<f64> {
        match self.theta {
            Some(_) => vec![self.theta_rad(0.0)],
            None => geometry::angle_grid(self.grid),
        }
    }
}

/// What a run produced, before it is written out.
pub struct Outcome {
    pub document: ReportDocument<RunConfig>,
    pub exit_code: i32,
}

fn scaled_planar_pair(c: &RunConfig, theta: f64) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let (mut x, mut y) = experiments::planar_pair(c.n, theta)?;
    x.iter_mut().for_each(|v| *v *= c.norm_x);
    y.iter_mut().for_each(|v| *v *= c.norm_y);
    Ok((x, y))
}

fn read_points(path: &PathBuf) -> Result<Vec<Vec<f64>>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid("points", format!("{}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| invalid("points", format!("line {}: {e}", i + 1)))
        })
        .collect()
}

/// Runs a validated config (anything but `selftest`) and builds its report.
pub fn execute(c: &RunConfig) -> Result<Outcome, RunError> {
    let mut exit_code = EXIT_OK;
    let mut verdict = None;
    let mut summary = None;
    let table: Table = match c.command {
        Command::Psi => {
            let mut t = Table::new(&["theta", "psi", "expected_output_cos", "unit_shrinkage_ratio", "cross_integral"]);
            for theta in c.angles() {
                t.push(vec![
                    theta.into(),
                    geometry::psi_of_angle(theta)?.into(),
                    geometry::expected_output_cos(theta)?.into(),
                    geometry::unit_shrinkage_ratio(theta)?.into(),
                    geometry::cross_integral_closed_form(geometry::check_angle(theta)?).into(),
                ]);
            }
            t
        }
        Command::Expect => {
            let mut t = Table::new(&["theta", "norm_x", "norm_y", "claim", "value", "bound_lower", "bound_upper"]);
            let claims: &[Claim] = match c.claim {
                ClaimChoice::Corrected => &[Claim::Corrected],
                ClaimChoice::Original => &[Claim::OriginalClaim],
                ClaimChoice::Both => &[Claim::Corrected, Claim::OriginalClaim],
            };
            for theta in c.angles() {
                let g = PairGeometry::from_norms_and_angle(c.norm_x, c.norm_y, theta)?;
                let (lo, hi) = geometry::shrinkage_bounds(&g);
                for &claim in claims {
                    t.push(vec![
                        theta.into(),
                        c.norm_x.into(),
                        c.norm_y.into(),
                        claim.name().into(),
                        geometry::expected_sq_dist(&g, claim).value.into(),
                        lo.into(),
                        hi.into(),
                    ]);
                }
            }
            t
        }
        Command::Mc => {
            let theta = c.theta_rad(FRAC_PI_2);
            let (x, y) = scaled_planar_pair(c, theta)?;
            let est = estimators::mc_sq_dist(&x, &y, c.m, c.trials, c.seed)?;
            let g = PairGeometry::from_norms_and_angle(c.norm_x, c.norm_y, theta)?;
            report::sweep_table(&[SweepRecord::new(&g, c.m, c.trials, est, None)])
        }
        Command::Refute => {
            let theta = c.theta_rad(PI);
            let (x, y) = scaled_planar_pair(c, theta)?;
            let v = estimators::refutation_test(&x, &y, c.m, c.trials, c.seed, c.thresholds())?;
            verdict = Some(v.verdict);
            if v.verdict != Verdict::SupportsCorrected {
                exit_code = EXIT_NOT_CORRECTED;
            }
            report::verdict_table(&v, c.m)
        }
        Command::ThetaSweep => {
            report::sweep_table(&experiments::theta_sweep(c.n, &c.angles(), c.m, c.trials, c.seed)?)
        }
        Command::Concentration => {
            let m_list = c
                .m_list
                .clone()
                .unwrap_or_else(|| (6..=13).map(|k| 1usize << k).collect());
            let recs = experiments::concentration_sweep(c.n, &m_list, c.theta_rad(FRAC_PI_2), c.trials, c.seed)?;
            summary = Some(vec![(
                "loglog_slope",
                Cell::from(experiments::concentration_slope(&recs)),
            )]);
            report::concentration_table(&recs)
        }
        Command::Angle => report::angle_table(&experiments::angle_sweep(c.n, &c.angles(), c.m, c.trials, c.seed)?),
        Command::Separate => {
            let rep = experiments::separation_experiment(&c.class_config(), c.m, c.layers, c.trials, c.seed)?;
            report::separation_table(&rep)
        }
        Command::Depth => {
            let widths = vec![c.m; c.layers];
            report::angle_table(&experiments::depth_sweep(c.n, c.theta_rad(PI), &widths, c.trials, c.seed)?)
        }
        Command::Meanwidth => {
            let points = match &c.points {
                Some(p) => read_points(p)?,
                None => (0..2)
                    .map(|k| {
                        let mut e = vec![0.0; c.n.max(2)];
                        e[k] = 1.0;
                        e
                    })
                    .collect(),
            };
            let est = estimators::mean_width_estimate(&points, c.samples, c.seed)?;
            let mut t = Table::new(&["points", "dim", "samples", "mc_mean", "mc_stderr"]);
            t.push(vec![
                points.len().into(),
                points[0].len().into(),
                c.samples.into(),
                est.mean.into(),
                est.stderr.into(),
            ]);
            t
        }
        Command::Selftest => {
            return Err(RunError::Invalid("selftest does not produce a report".into()));
        }
    };
    let mut document = ReportDocument::new(c.clone(), table);
    document.verdict = verdict;
    document.summary = summary;
    Ok(Outcome { document, exit_code })
}

/// Renders a report in the configured format.
pub fn render(c: &RunConfig, doc: &ReportDocument<RunConfig>) -> String {
    match c.format {
        Format::Csv => report::emit_csv(&doc.records),
        Format::Json => report::emit_json(doc),
    }
}

fn report_selftest<W: Write>(results: &[acceptance::CriterionResult], stdout: &mut W) -> i32 {
    for r in results {
        let _ = writeln!(stdout, "{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(stdout, "{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_RUNTIME
    }
}

/// Entry point: parses `argv` (including the program name), runs, writes
/// output and returns the process exit code.
pub fn run<I, T, W, E>(argv: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let (command, flags) = cli.command.split();
    let config = match RunConfig::resolve(command, &flags) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return e.exit_code();
        }
    };

    let pool = match flags.threads {
        Some(0) => {
            let _ = writeln!(stderr, "invalid arguments: --threads: must be at least 1");
            return EXIT_INVALID;
        }
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(p) => Some(p),
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_RUNTIME;
            }
        },
        None => None,
    };
    let work = || {
        if command == Command::Selftest {
            Ok(None)
        } else {
            execute(&config).map(Some)
        }
    };
    let result = match &pool {
        Some(p) => p.install(work),
        None => work(),
    };

    let outcome = match result {
        Ok(Some(o)) => o,
        Ok(None) => {
            let results = match &pool {
                Some(p) => p.install(acceptance::run_all),
                None => acceptance::run_all(),
            };
            return report_selftest(&results, stdout);
        }
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return e.exit_code();
        }
    };

    if let Some(v) = outcome.document.verdict {
        let _ = writeln!(stderr, "verdict: {}", v.name());
    }
    if let Some(summary) = &outcome.document.summary {
        for (k, v) in summary {
            let _ = writeln!(stderr, "{k}: {}", v.csv());
        }
    }
    let text = render(&config, &outcome.document);
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(stderr, "error: writing {}: {e}", path.display());
                return EXIT_RUNTIME;
            }
        }
        None => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_RUNTIME;
            }
        }
    }
    outcome.exit_code
}

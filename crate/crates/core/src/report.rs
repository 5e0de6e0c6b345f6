//! CSV and JSON emission.
//!
//! Records are first flattened into a [`Table`] of typed cells; both
//! emitters render floats through the same routine (rounded to 12
//! significant digits, then printed in shortest round-trip form), so a
//! value reads the same digit-for-digit in either format.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::estimators::{Verdict, ZScoreVerdict};
use crate::experiments::{AngleRecord, GroupStats, SeparationReport, SweepRecord};

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Decimal text of a float as it appears in every emitted file.
pub fn format_float(x: f64) -> String {
    match Number::from_f64(round_sig12(x)) {
        Some(n) => n.to_string(),
        None if x.is_nan() => "NaN".into(),
        None if x > 0.0 => "inf".into(),
        None => "-inf".into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Absent,
}

impl Cell {
    /// The cell as written in CSV.
    pub fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Absent => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Number::from_f64(round_sig12(*v)).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Absent => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Absent, Cell::Float)
    }
}

/// Homogeneous rows under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn records_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, c)| (k.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Header line, then one comma-separated line per row, `\n` terminated.
pub fn emit_csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub const SWEEP_COLUMNS: [&str; 9] = [
    "theta",
    "m",
    "trials",
    "mc_mean",
    "mc_stderr",
    "analytic_corrected",
    "analytic_original",
    "bound_lower",
    "bound_upper",
];

pub fn sweep_table(records: &[SweepRecord]) -> Table {
    let mut t = Table::new(&SWEEP_COLUMNS);
    for r in records {
        t.push(vec![
            r.theta.into(),
            r.m.into(),
            r.trials.into(),
            r.empirical.mean.into(),
            r.empirical.stderr.into(),
            r.analytic_corrected.into(),
            r.analytic_original.into(),
            r.bound_lower.into(),
            r.bound_upper.into(),
        ]);
    }
    t
}

pub fn concentration_table(records: &[SweepRecord]) -> Table {
    let mut columns = SWEEP_COLUMNS.to_vec();
    columns.extend(["rms_deviation", "max_deviation"]);
    let mut t = Table::new(&columns);
    let base = sweep_table(records);
    for (row, r) in base.rows.into_iter().zip(records) {
        let mut row = row;
        row.push(r.deviation.map(|d| d.rms).into());
        row.push(r.deviation.map(|d| d.max).into());
        t.push(row);
    }
    t
}

pub fn angle_table(records: &[AngleRecord]) -> Table {
    let mut t = Table::new(&[
        "theta",
        "depth",
        "m",
        "trials",
        "mc_mean",
        "mc_stderr",
        "degenerate_trials",
        "predicted_cos",
    ]);
    for r in records {
        t.push(vec![
            r.theta.into(),
            r.depth.into(),
            r.m.into(),
            r.trials.into(),
            r.empirical.mean.into(),
            r.empirical.stderr.into(),
            r.degenerate_trials.into(),
            r.predicted_cos.into(),
        ]);
    }
    t
}

pub fn separation_table(report: &SeparationReport) -> Table {
    let mut t = Table::new(&[
        "group",
        "m",
        "layers",
        "trials",
        "pairs",
        "mean_pre",
        "mean_post",
        "min_pre",
        "min_post",
        "max_pre",
        "max_post",
        "mean_ratio",
    ]);
    let row = |name: &str, g: &GroupStats| {
        vec![
            name.into(),
            report.m.into(),
            report.layers.into(),
            report.trials.into(),
            g.pairs.into(),
            g.mean_pre.into(),
            g.mean_post.into(),
            g.min_pre.into(),
            g.min_post.into(),
            g.max_pre.into(),
            g.max_post.into(),
            g.mean_ratio.into(),
        ]
    };
    t.push(row("intra", &report.intra));
    t.push(row("inter", &report.inter));
    t
}

pub fn verdict_table(v: &ZScoreVerdict, m: usize) -> Table {
    let mut t = Table::new(&[
        "theta",
        "norm_x",
        "norm_y",
        "m",
        "trials",
        "mc_mean",
        "mc_stderr",
        "analytic_corrected",
        "analytic_original",
        "z_corrected",
        "z_original",
        "verdict",
    ]);
    t.push(vec![
        v.geometry.theta.into(),
        v.geometry.norm_x.into(),
        v.geometry.norm_y.into(),
        m.into(),
        v.estimate.trials.into(),
        v.estimate.mean.into(),
        v.estimate.stderr.into(),
        v.corrected.into(),
        v.original.into(),
        v.z_corrected.into(),
        v.z_original.into(),
        v.verdict.name().into(),
    ]);
    t
}

/// Provenance block; no timestamp so that payloads stay reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub artifact: &'static str,
    pub version: &'static str,
}

impl Default for Provenance {
    fn default() -> Self {
        Self {
            artifact: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Everything one run emits.
#[derive(Debug, Clone)]
pub struct ReportDocument<C: Serialize> {
    pub config: C,
    pub records: Table,
    pub verdict: Option<Verdict>,
    /// Run-level scalars such as a fitted slope.
    pub summary: Option<Vec<(&'static str, Cell)>>,
    pub provenance: Provenance,
}

impl<C: Serialize> ReportDocument<C> {
    pub fn new(config: C, records: Table) -> Self {
        Self {
            config,
            records,
            verdict: None,
            summary: None,
            provenance: Provenance::default(),
        }
    }
}

/// Pretty JSON with keys in the order `config`, `records`, `verdict`,
/// `summary`, `provenance`; the optional keys appear only when set.
pub fn emit_json<C: Serialize>(doc: &ReportDocument<C>) -> String {
    let mut top = Map::new();
    top.insert(
        "config".into(),
        serde_json::to_value(&doc.config).expect("config serializes"),
    );
    top.insert("records".into(), doc.records.records_json());
    if let Some(v) = doc.verdict {
        top.insert("verdict".into(), Value::String(v.name().into()));
    }
    if let Some(summary) = &doc.summary {
        let obj: Map<String, Value> = summary.iter().map(|(k, c)| (k.to_string(), c.json())).collect();
        top.insert("summary".into(), Value::Object(obj));
    }
    top.insert(
        "provenance".into(),
        serde_json::to_value(&doc.provenance).expect("provenance serializes"),
    );
    let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json renders");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::MomentEstimate;
    use crate::geometry::PairGeometry;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn record(theta: f64) -> SweepRecord {
        let g = PairGeometry::unit(theta).unwrap();
        let e = MomentEstimate {
            mean: 0.123_456_789_012_345,
            stderr: 1e-20,
            trials: 400,
            master_seed: 0,
        };
        SweepRecord::new(&g, 1024, 400, e, None)
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(
            emit_csv(&sweep_table(&[])),
            "theta,m,trials,mc_mean,mc_stderr,analytic_corrected,analytic_original,bound_lower,bound_upper\n"
        );
    }

    #[test]
    fn zero_angle_row_has_zero_analytics() {
        let csv = emit_csv(&sweep_table(&[record(0.0)]));
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(&row[5..], &["0.0", "0.0", "0.0", "0.0"]);
    }

    #[test]
    fn antipodal_row_values() {
        let csv = emit_csv(&sweep_table(&[record(PI)]));
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "3.14159265359");
        assert_eq!(row[3], "0.123456789012");
        assert_eq!(row[4], "1e-20");
        assert_eq!(&row[5..], &["1.0", "3.0", "1.0", "2.0"]);
    }

    #[test]
    fn csv_and_json_agree_digit_for_digit() {
        let recs: Vec<SweepRecord> = [0.1, 1.0, 2.5, PI].into_iter().map(record).collect();
        let table = sweep_table(&recs);
        let doc = ReportDocument::new(serde_json::json!({"k": 1}), table.clone());
        let json: Value = serde_json::from_str(&emit_json(&doc)).unwrap();
        let csv = emit_csv(&table);
        for (line, obj) in csv.lines().skip(1).zip(json["records"].as_array().unwrap()) {
            for (cell, col) in line.split(',').zip(&table.columns) {
                assert_eq!(cell, obj[*col].to_string(), "column {col}");
            }
        }
    }

    #[test]
    fn json_key_order_and_optional_keys() {
        let mut doc = ReportDocument::new(serde_json::json!({"b": 1, "a": 2}), sweep_table(&[]));
        let s = emit_json(&doc);
        assert!(s.find("\"config\"").unwrap() < s.find("\"records\"").unwrap());
        assert!(!s.contains("\"verdict\""));
        doc.verdict = Some(Verdict::SupportsCorrected);
        doc.summary = Some(vec![("loglog_slope", Cell::Absent)]);
        let s = emit_json(&doc);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["verdict"], "SupportsCorrected");
        assert!(v["summary"]["loglog_slope"].is_null());
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["config", "records", "verdict", "summary", "provenance"]);
        assert!(s.find("\"b\"").unwrap() < s.find("\"a\"").unwrap());
    }

    #[test]
    fn non_finite_cells() {
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(Cell::Float(f64::NAN).json(), Value::Null);
        assert_eq!(Cell::Absent.csv(), "");
    }

    proptest! {
        #[test]
        fn rounding_is_idempotent_and_tight(x in -1e6f64..1e6) {
            let r = round_sig12(x);
            prop_assert_eq!(round_sig12(r), r);
            prop_assert!((r - x).abs() <= 5e-12 * x.abs());
            let text = format_float(x);
            let digits = text.trim_start_matches('-').replace('.', "");
            let sig = digits.split('e').next().unwrap().trim_start_matches('0').trim_end_matches('0');
            prop_assert!(sig.len() <= 12, "{}", text);
            prop_assert_eq!(text.parse::<f64>().unwrap(), r);
        }
    }
}

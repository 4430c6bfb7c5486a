//! Deterministic reports: `key = value` text or one flat JSON object per line.
//!
//! Floats are rounded to 12 significant digits before printing, so reports
//! do not depend on the last bits of a reduction order.

use std::fmt::Write as _;

use crate::comass::ComassCertificate;
use crate::exterior::text::format_form;
use crate::exterior::SimpleVector;
use crate::geometry::StationarityReport;
use crate::obstruction::{CandidateOutcome, DecompositionReport, DichotomySummary, ObstructionReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Text,
    Records,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn text_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        let r = round12(x);
        if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

/// A named, ordered list of fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Self { kind: kind.into(), fields: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.push((key.into(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn json_line(&self) -> String {
        let mut out = format!("{{\"record\":{}", serde_json::Value::from(self.kind.as_str()));
        for (k, v) in &self.fields {
            let v = match v {
                Value::Num(x) => serde_json::Number::from_f64(round12(*x)).map_or(serde_json::Value::Null, Into::into),
                Value::Int(i) => (*i).into(),
                Value::Bool(b) => (*b).into(),
                Value::Str(s) => s.as_str().into(),
            };
            let _ = write!(out, ",{}:{}", serde_json::Value::from(k.as_str()), v);
        }
        out.push('}');
        out
    }
}

/// Renders records. In text form, records whose kind repeats are prefixed
/// `kind[index]`.
pub fn emit_report(records: &[Record], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Records => {
            for r in records {
                out.push_str(&r.json_line());
                out.push('\n');
            }
        }
        Format::Text => {
            let mut seen: Vec<(&str, usize)> = Vec::new();
            for r in records {
                let n = match seen.iter_mut().find(|(k, _)| *k == r.kind) {
                    Some((_, n)) => {
                        *n += 1;
                        *n
                    }
                    None => {
                        seen.push((&r.kind, 0));
                        0
                    }
                };
                let repeated = records.iter().filter(|o| o.kind == r.kind).count() > 1;
                let prefix = if repeated { format!("{}[{n}]", r.kind) } else { r.kind.clone() };
                for (k, v) in &r.fields {
                    let v = match v {
                        Value::Num(x) => text_num(*x),
                        Value::Int(i) => i.to_string(),
                        Value::Bool(b) => b.to_string(),
                        Value::Str(s) => s.clone(),
                    };
                    let _ = writeln!(out, "{prefix}.{k} = {v}");
                }
            }
        }
    }
    out
}

fn plane_text(xi: &SimpleVector) -> String {
    format_form(&xi.expand().dual()).trim_end().replace('\n', "; ")
}

pub fn comass_records(cert: &ComassCertificate) -> Vec<Record> {
    let mut head = Record::new("comass")
        .with("comass", cert.value)
        .with("method", cert.method.as_str())
        .with("restarts_used", cert.restarts_used)
        .with("converged", cert.converged)
        .with("maximizers", cert.maximizers.len());
    head = match cert.oracle_gap {
        Some(g) => head.with("oracle_gap", g),
        None => head.with("oracle_gap", "none"),
    };
    let mut out = vec![head];
    out.extend(cert.maximizers.iter().map(|m| Record::new("maximizer").with("plane", plane_text(m))));
    out
}

pub fn stationarity_record(report: &StationarityReport) -> Record {
    Record::new("stationarity")
        .with("max_abs", report.max_abs)
        .with("mean_abs", report.mean_abs)
        .with("n_fields", report.n_fields)
        .with("seed", report.seed)
}

pub fn decomposition_record(report: &DecompositionReport) -> Record {
    let allowed: Vec<String> = report.allowed_terms.iter().map(|(k, a)| format!("{k}:{}", text_num(*a))).collect();
    Record::new("decomposition")
        .with("leading_coefficient", report.leading_coefficient)
        .with("forbidden_max", report.forbidden_max)
        .with("allowed_terms", report.allowed_terms.len())
        .with("allowed", allowed.join(" "))
}

pub fn obstruction_record(report: &ObstructionReport) -> Record {
    Record::new("obstruction")
        .with("verdict", report.verdict.as_str())
        .with("calibration_residual", report.calibration_residual)
        .with("calibration_min", report.calibration_min)
        .with("comass", report.comass)
        .with("psi_mean", report.psi_mean)
        .with("psi_constancy", report.psi_constancy)
        .with("psi_expected", report.psi_expected)
        .with("pullback_integral", report.pullback_integral)
        .with("predicted_magnitude", report.predicted_magnitude)
        .with("stokes_value", report.stokes_value)
        .with("cal_tol", report.cal_tol)
}

fn candidate_record(index: usize, c: &CandidateOutcome) -> Record {
    let r = &c.report;
    Record::new("candidate")
        .with("index", index)
        .with("kind", c.kind.as_str())
        .with("verdict", r.verdict.as_str())
        .with("calibration_residual", r.calibration_residual)
        .with("comass", r.comass)
        .with("pullback_integral", r.pullback_integral)
}

pub fn dichotomy_records(summary: &DichotomySummary) -> Vec<Record> {
    let mut out = vec![Record::new("dichotomy")
        .with("candidates", summary.outcomes.len())
        .with("violations", summary.violations)
        .with("calibrating", summary.calibrating)
        .with("calibrating_with_large_integral", summary.calibrating_with_large_integral)
        .with("best_residual", summary.best_residual)
        .with("max_abs_pullback", summary.max_abs_pullback)
        .with("predicted_magnitude", summary.predicted_magnitude)];
    out.extend(summary.outcomes.iter().enumerate().map(|(i, c)| candidate_record(i, c)));
    out
}

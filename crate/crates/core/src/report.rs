//! Check records, verification reports and their renderings.
//!
//! Renderings are byte-stable: records are sorted by id, floats use Rust's
//! shortest round-trip formatting, and wall time is kept on the record but
//! never rendered.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Passes when `residual ≤ tolerance`.
    Equality,
    /// Passes when `residual ≥ tolerance` (the violation threshold).
    Violation,
    /// Recorded for information; tolerance is `inf`.
    Report,
}

/// JSON has no infinities; non-finite values travel as strings.
mod float_or_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub anchor: String,
    #[serde(with = "float_or_string")]
    pub residual: f64,
    #[serde(with = "float_or_string")]
    pub tolerance: f64,
    pub kind: CheckKind,
    pub pass: bool,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl CheckRecord {
    fn new(id: &str, anchor: &str, residual: f64, tolerance: f64, kind: CheckKind) -> Self {
        // Norms of exactly cancelling sums can come out as −0.
        let residual = residual + 0.0;
        let pass = match kind {
            CheckKind::Equality | CheckKind::Report => residual <= tolerance,
            CheckKind::Violation => residual >= tolerance,
        };
        Self { check_id: id.into(), anchor: anchor.into(), residual, tolerance, kind, pass, wall_time_s: 0.0 }
    }

    pub fn equality(id: &str, anchor: &str, residual: f64, tol: f64) -> Self {
        Self::new(id, anchor, residual, tol, CheckKind::Equality)
    }

    pub fn violation(id: &str, anchor: &str, residual: f64, threshold: f64) -> Self {
        Self::new(id, anchor, residual, threshold, CheckKind::Violation)
    }

    pub fn report(id: &str, anchor: &str, value: f64) -> Self {
        Self::new(id, anchor, value, f64::INFINITY, CheckKind::Report)
    }

    pub fn with_wall_time(mut self, seconds: f64) -> Self {
        self.wall_time_s = seconds;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    pub config: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new(suite: &str, mut records: Vec<CheckRecord>, config: BTreeMap<String, String>) -> Self {
        records.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        let passed = records.iter().filter(|r| r.pass).count();
        let summary = Summary { total: records.len(), passed, failed: records.len() - passed };
        Self { suite: suite.into(), records, summary, config }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn record(&self, id: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check_id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::UnknownFormat(other.into())),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Text => "text",
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn render_report(report: &VerificationReport, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut v = serde_json::to_vec_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check_id", "anchor", "residual", "tolerance", "pass"])?;
            for r in &report.records {
                w.write_record([r.check_id.as_str(), &r.anchor, &num(r.residual), &num(r.tolerance), &r.pass.to_string()])?;
            }
            w.into_inner().map_err(|e| Error::Io(e.to_string()))
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "suite: {}", report.suite);
            for (k, v) in &report.config {
                let _ = writeln!(s, "  {k} = {v}");
            }
            for r in &report.records {
                let cmp = match r.kind {
                    CheckKind::Equality => "<=",
                    CheckKind::Violation => ">=",
                    CheckKind::Report => "  ",
                };
                let _ = writeln!(
                    s,
                    "{} {:<52} [{}] residual {} {} {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.check_id,
                    r.anchor,
                    num(r.residual),
                    cmp,
                    num(r.tolerance)
                );
            }
            let _ = writeln!(
                s,
                "summary: {} checks, {} passed, {} failed",
                report.summary.total, report.summary.passed, report.summary.failed
            );
            Ok(s.into_bytes())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerificationReport {
        let recs = vec![
            CheckRecord::violation("b/violation", "Table III", 0.25, 0.1),
            CheckRecord::equality("a/equality", "MCR1", 1e-17, 1e-10).with_wall_time(3.0),
            CheckRecord::report("c/info", "Eq. gauge-hiding", 0.5),
            CheckRecord::equality("d/nan", "MCR2", f64::NAN, 1e-10),
        ];
        VerificationReport::new("demo", recs, BTreeMap::from([("seed".into(), "1".into())]))
    }

    #[test]
    fn sorted_and_summarized() {
        let r = sample();
        let ids: Vec<_> = r.records.iter().map(|x| x.check_id.as_str()).collect();
        assert_eq!(ids, ["a/equality", "b/violation", "c/info", "d/nan"]);
        assert_eq!(r.summary, Summary { total: 4, passed: 3, failed: 1 });
        assert!(!r.all_passed());
    }

    #[test]
    fn csv_schema() {
        let out = String::from_utf8(render_report(&sample(), OutputFormat::Csv).unwrap()).unwrap();
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("check_id,anchor,residual,tolerance,pass"));
        assert_eq!(lines.next(), Some("a/equality,MCR1,1e-17,1e-10,true"));
        assert!(out.contains("c/info,Eq. gauge-hiding,5e-1,inf,true"));
    }

    #[test]
    fn json_round_trip_drops_wall_time() {
        let r = sample();
        let bytes = render_report(&r, OutputFormat::Json).unwrap();
        let back: VerificationReport = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back.records[2].tolerance, f64::INFINITY);
        assert!(back.records[3].residual.is_nan());
        assert_eq!(back.records[0].wall_time_s, 0.0);
        assert_eq!(back.records[..3], r.records[..3].iter().map(|x| CheckRecord { wall_time_s: 0.0, ..x.clone() }).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn empty_report_renders() {
        let r = VerificationReport::new("empty", vec![], BTreeMap::new());
        for f in [OutputFormat::Text, OutputFormat::Json, OutputFormat::Csv] {
            assert!(!render_report(&r, f).unwrap().is_empty());
        }
        assert!(r.all_passed());
    }

    #[test]
    fn formats_parse() {
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert_eq!("xml".parse::<OutputFormat>(), Err(Error::UnknownFormat("xml".into())));
    }
}

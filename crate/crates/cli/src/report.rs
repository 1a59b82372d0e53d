//! Suite reports and their JSON, CSV and plain-text renderings.
//!
//! Floating-point values are written as strings with 17 significant digits,
//! so output bytes depend only on the computed values.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub mod sig17 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn format(x: f64) -> String {
        if x.is_finite() {
            format!("{x:.16e}")
        } else {
            x.to_string()
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_str(&super::format(*v)),
                None => s.serialize_str(""),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            let s = Option::<String>::deserialize(d)?.unwrap_or_default();
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(serde::de::Error::custom)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A geometric precondition of the numerical scheme was not met.
    Refused,
}

/// How `value` is compared with `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    Exact,
}

impl Comparison {
    pub fn accepts(&self, value: f64, tolerance: f64) -> bool {
        match self {
            Comparison::AtMost => value <= tolerance,
            Comparison::AtLeast => value >= tolerance,
            Comparison::Exact => value == tolerance,
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Exact => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub inputs_digest: String,
    /// What the check expects, e.g. `"0 (exact)"` or `"4*pi^2"`.
    pub expected: String,
    #[serde(with = "sig17")]
    pub value: f64,
    #[serde(with = "sig17")]
    pub tolerance: f64,
    pub comparison: Comparison,
    pub status: Status,
    pub detail: String,
}

/// One row of a pairing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub s: String,
    pub q_or_p: String,
    #[serde(with = "sig17")]
    pub value_re: f64,
    #[serde(with = "sig17")]
    pub value_im: f64,
    pub method: String,
    #[serde(with = "sig17::option")]
    pub discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub n: usize,
    #[serde(with = "sig17")]
    pub radius: f64,
    pub r_max: u32,
    pub s_max: u32,
    pub q_max: u32,
    pub resolution: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub refused: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub environment: Environment,
    pub records: Vec<Record>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<TableRow>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub artifacts: BTreeMap<String, serde_json::Value>,
    pub summary: Summary,
    /// No record failed. Refusals are counted separately.
    pub pass: bool,
    /// Shown in the plain-text rendering only.
    #[serde(skip)]
    pub wall_time: Duration,
}

pub fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl SuiteReport {
    pub fn new(suite: &str, environment: Environment) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            environment,
            records: Vec::new(),
            table: Vec::new(),
            artifacts: BTreeMap::new(),
            summary: Summary::default(),
            pass: true,
            wall_time: Duration::ZERO,
        }
    }

    pub fn finish(&mut self) {
        let count = |s: Status| self.records.iter().filter(|r| r.status == s).count();
        self.summary = Summary {
            total: self.records.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            refused: count(Status::Refused),
        };
        self.pass = self.summary.failed == 0;
    }

    pub fn absorb(&mut self, other: SuiteReport) {
        self.records.extend(other.records);
        self.table.extend(other.table);
        for (k, v) in other.artifacts {
            self.artifacts.insert(format!("{}.{k}", other.suite), v);
        }
    }

    pub fn record(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn exit_code(&self, strict: bool) -> i32 {
        if !self.pass || (strict && self.summary.refused > 0) {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

pub fn to_json(report: &SuiteReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<SuiteReport, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

fn write_csv<T: Serialize>(rows: &[T], header: &[&str]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(!rows.is_empty()).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).expect("in-memory write");
    }
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub const RECORD_COLUMNS: [&str; 8] =
    ["id", "inputs_digest", "expected", "value", "tolerance", "comparison", "status", "detail"];
pub const TABLE_COLUMNS: [&str; 6] = ["s", "q_or_p", "value_re", "value_im", "method", "discrepancy"];

/// The pairing table when the report has one, otherwise the records.
pub fn to_csv(report: &SuiteReport) -> String {
    if report.table.is_empty() {
        write_csv(&report.records, &RECORD_COLUMNS)
    } else {
        write_csv(&report.table, &TABLE_COLUMNS)
    }
}

pub fn records_from_csv(text: &str) -> Result<Vec<Record>, CliError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Parse(e.to_string()))
}

pub fn table_from_csv(text: &str) -> Result<Vec<TableRow>, CliError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Parse(e.to_string()))
}

pub fn to_human(report: &SuiteReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let env = &report.environment;
    let _ = writeln!(
        out,
        "suite {}  (n = {}, R = {}, resolution {}, seed {})",
        report.suite, env.n, env.radius, env.resolution, env.seed
    );
    for r in &report.records {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Refused => "REFUSED",
        };
        let _ = writeln!(
            out,
            "  {tag:<7} {:<44} {:>24} {} {:<24} {}",
            r.id,
            sig17::format(r.value),
            r.comparison.symbol(),
            sig17::format(r.tolerance),
            r.detail
        );
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "{} checks: {} passed, {} failed, {} refused in {:.2} s",
        s.total,
        s.passed,
        s.failed,
        s.refused,
        report.wall_time.as_secs_f64()
    );
    out
}

pub fn render(report: &SuiteReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
        Format::Human => to_human(report),
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit_report(report: &SuiteReport, format: Format, path: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = render(report, format);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> Environment {
        Environment {
            version: "0.0.0".into(),
            n: 2,
            radius: 1.0,
            r_max: 6,
            s_max: 4,
            q_max: 3,
            resolution: "32x32x24".into(),
            seed: 1,
        }
    }

    #[test]
    fn empty_suite_is_valid() {
        let mut r = SuiteReport::new("empty", env());
        r.finish();
        let back = from_json(&to_json(&r)).unwrap();
        assert_eq!(back.records.len(), 0);
        assert!(back.pass);
        assert_eq!(records_from_csv(&to_csv(&r)).unwrap(), Vec::<Record>::new());
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, -0.1, 4.0 * std::f64::consts::PI.powi(2)] {
            assert_eq!(sig17::format(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(sig17::format(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn table_round_trip() {
        let mut r = SuiteReport::new("t", env());
        r.table.push(TableRow {
            s: "(1,0)".into(),
            q_or_p: "(0,2)".into(),
            value_re: 39.47841760435743,
            value_im: -1e-17,
            method: "exact+quadrature".into(),
            discrepancy: Some(3.2e-14),
        });
        r.table.push(TableRow { discrepancy: None, ..r.table[0].clone() });
        assert_eq!(table_from_csv(&to_csv(&r)).unwrap(), r.table);
    }
}

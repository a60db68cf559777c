//! Structured verification reports.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use super::config::RunConfig;
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A published formula disagrees with its oracle; informational only.
    Reported,
}

/// How `max_deviation` is compared with `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    /// Strict lower bound, used for margins that must stay positive.
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Comparison::AtMost => value <= tol,
            Comparison::Above => value > tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub reported: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub data: BTreeMap<String, Value>,
    pub summary: Summary,
}

impl Report {
    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Collects check records for one command.
#[derive(Debug)]
pub struct Checks {
    command: String,
    records: Vec<CheckRecord>,
    data: BTreeMap<String, Value>,
}

impl Checks {
    pub fn new(command: &str) -> Self {
        Checks {
            command: command.to_string(),
            records: Vec::new(),
            data: BTreeMap::new(),
        }
    }

    fn push(&mut self, rec: CheckRecord) {
        assert!(
            self.records.iter().all(|r| r.id != rec.id),
            "duplicate check id `{}`",
            rec.id
        );
        self.records.push(rec);
    }

    fn record(
        &mut self,
        id: &str,
        anchor: &str,
        value: Result<f64>,
        tol: f64,
        cmp: Comparison,
        miss: Status,
    ) -> bool {
        let (status, dev, note) = match value {
            Ok(v) if cmp.holds(v, tol) => (Status::Pass, v, None),
            Ok(v) => (miss, v, None),
            Err(e) => (Status::Fail, f64::NAN, Some(e.to_string())),
        };
        self.push(CheckRecord {
            id: id.to_string(),
            anchor: anchor.to_string(),
            status,
            max_deviation: dev,
            tolerance: tol,
            comparison: cmp,
            note,
        });
        status == Status::Pass
    }

    /// Pass when `value <= tol`, fail otherwise.
    pub fn at_most(&mut self, id: &str, anchor: &str, value: Result<f64>, tol: f64) -> bool {
        self.record(id, anchor, value, tol, Comparison::AtMost, Status::Fail)
    }

    /// Pass when `value > bound`, fail otherwise.
    pub fn above(&mut self, id: &str, anchor: &str, value: Result<f64>, bound: f64) -> bool {
        self.record(id, anchor, value, bound, Comparison::Above, Status::Fail)
    }

    /// A published formula compared with its oracle: pass or reported.
    pub fn claim(&mut self, id: &str, anchor: &str, value: Result<f64>, tol: f64) -> bool {
        self.record(id, anchor, value, tol, Comparison::AtMost, Status::Reported)
    }

    /// Pass when `ok` holds; the deviation is 0 or 1.
    pub fn holds(&mut self, id: &str, anchor: &str, ok: Result<bool>) -> bool {
        self.at_most(id, anchor, ok.map(|b| if b { 0.0 } else { 1.0 }), 0.0)
    }

    pub fn note(&mut self, id: &str, note: impl Into<String>) {
        if let Some(r) = self.records.iter_mut().find(|r| r.id == id) {
            r.note = Some(note.into());
        }
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("data serializes");
        self.data.insert(key.to_string(), v);
    }

    pub fn finish(self, config: &RunConfig) -> Report {
        let mut summary = Summary {
            total: self.records.len(),
            ..Summary::default()
        };
        for r in &self.records {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Reported => summary.reported += 1,
            }
        }
        Report {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command,
            config: config.clone(),
            checks: self.records,
            data: self.data,
            summary,
        }
    }
}

/// Running maximum that keeps the first error it sees.
#[derive(Debug, Default)]
pub struct MaxDev {
    worst: f64,
    error: Option<GeomError>,
}

impl MaxDev {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Result<f64>) {
        match v {
            // A NaN deviation must stick so the check fails.
            Ok(x) if x.is_nan() || self.worst.is_nan() => self.worst = f64::NAN,
            Ok(x) => self.worst = self.worst.max(x),
            Err(e) => {
                if self.error.is_none() {
                    self.error = Some(e);
                }
            }
        }
    }

    pub fn value(&self) -> Result<f64> {
        match &self.error {
            Some(e) => Err(e.clone()),
            None => Ok(self.worst),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_and_summary() {
        let mut c = Checks::new("demo");
        assert!(c.at_most("a", "x", Ok(1e-9), 1e-8));
        assert!(!c.at_most("b", "x", Ok(1.0), 1e-8));
        assert!(!c.claim("c", "x", Ok(1.0), 1e-8));
        assert!(c.above("d", "x", Ok(0.5), 0.0));
        assert!(!c.at_most("e", "x", Err(GeomError::Pole(0.0)), 1.0));
        assert!(!c.at_most("f", "x", Ok(f64::NAN), 1.0));
        let r = c.finish(&RunConfig::default());
        assert_eq!(
            r.summary,
            Summary {
                pass: 2,
                fail: 3,
                reported: 1,
                total: 6
            }
        );
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.check("c").unwrap().status, Status::Reported);
        assert!(r.check("e").unwrap().note.is_some());
        assert!(r.to_json().contains("\"max_deviation\": null"));
    }

    #[test]
    fn reported_does_not_fail() {
        let mut c = Checks::new("demo");
        c.claim("c", "x", Ok(1.0), 1e-8);
        assert_eq!(c.finish(&RunConfig::default()).exit_code(), 0);
    }

    #[test]
    #[should_panic(expected = "duplicate check id")]
    fn duplicate_ids_rejected() {
        let mut c = Checks::new("demo");
        c.holds("a", "x", Ok(true));
        c.holds("a", "x", Ok(true));
    }

    #[test]
    fn max_dev_keeps_first_error() {
        let mut m = MaxDev::new();
        m.add(Ok(1.0));
        m.add(Err(GeomError::Pole(1.0)));
        m.add(Ok(3.0));
        assert_eq!(m.value(), Err(GeomError::Pole(1.0)));
        let mut m = MaxDev::new();
        m.add(Ok(1.0));
        m.add(Ok(3.0));
        assert_eq!(m.value(), Ok(3.0));
    }
}

//! Suite reports: text and structured (JSON) renderings with stable ordering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    InputError,
    ResourceError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::InputError => "INPUT ERROR",
            Status::ResourceError => "CAP EXCEEDED",
        }
    }
}

/// One side of a violated identity with its exact value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub expr: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub identity: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub context: Vec<String>,
    pub sides: Vec<Side>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub index: usize,
    pub label: String,
    pub kind: String,
    pub status: Status,
    pub summary: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub input_errors: usize,
    pub resource_errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub index: usize,
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub report_version: u32,
    pub scenario: String,
    pub atoms: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub summary: Summary,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl SuiteReport {
    pub fn new(scenario: String, atoms: usize, seed: Option<u64>, checks: Vec<CheckRecord>, timings: Option<Vec<Timing>>) -> Self {
        let mut summary = Summary {
            total: checks.len(),
            ..Summary::default()
        };
        for c in &checks {
            match c.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::InputError => summary.input_errors += 1,
                Status::ResourceError => summary.resource_errors += 1,
            }
        }
        SuiteReport {
            report_version: REPORT_VERSION,
            scenario,
            atoms,
            seed,
            summary,
            checks,
            timings,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    /// 0 when every check passed, 2 for any input error, else 3 for any exceeded cap, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.summary.input_errors > 0 {
            2
        } else if self.summary.resource_errors > 0 {
            3
        } else if self.summary.failed > 0 {
            1
        } else {
            0
        }
    }

    pub fn without_timings(mut self) -> Self {
        self.timings = None;
        self
    }
}

pub fn render_text(report: &SuiteReport) -> String {
    let mut out = String::new();
    let _ = write!(out, "scenario {} ({} atoms", report.scenario, report.atoms);
    if let Some(seed) = report.seed {
        let _ = write!(out, ", seed {seed}");
    }
    let _ = writeln!(out, ")");
    for c in &report.checks {
        let _ = writeln!(out, "[{}] {} ... {}", c.index + 1, c.label, c.status.as_str());
        let _ = writeln!(out, "    {}", c.summary);
        for d in &c.details {
            let _ = writeln!(out, "    - {d}");
        }
        for w in &c.witnesses {
            let _ = writeln!(out, "    witness: {}", w.identity);
            for ctx in &w.context {
                let _ = writeln!(out, "      {ctx}");
            }
            for s in &w.sides {
                let _ = writeln!(out, "      {} = {}", s.expr, s.value);
            }
        }
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "summary: {} checks, {} passed, {} failed, {} input errors, {} over caps",
        s.total, s.passed, s.failed, s.input_errors, s.resource_errors
    );
    if let Some(timings) = &report.timings {
        let _ = writeln!(out, "timings:");
        for t in timings {
            let _ = writeln!(out, "  [{}] {}.{:03} ms", t.index + 1, t.micros / 1000, t.micros % 1000);
        }
    }
    out
}

pub fn render_structured(report: &SuiteReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}

pub fn parse_structured(text: &str) -> Result<SuiteReport, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(status: Status) -> CheckRecord {
        CheckRecord {
            index: 0,
            label: "x()".into(),
            kind: "x".into(),
            status,
            summary: String::new(),
            details: vec![],
            witnesses: vec![],
        }
    }

    #[test]
    fn exit_codes() {
        let r = |s: Vec<Status>| SuiteReport::new("s".into(), 1, None, s.into_iter().map(record).collect(), None);
        assert_eq!(r(vec![]).exit_code(), 0);
        assert_eq!(r(vec![Status::Pass, Status::Fail]).exit_code(), 1);
        assert_eq!(r(vec![Status::Fail, Status::ResourceError]).exit_code(), 3);
        assert_eq!(r(vec![Status::ResourceError, Status::InputError]).exit_code(), 2);
    }

    #[test]
    fn structured_round_trip() {
        let rep = SuiteReport::new(
            "s".into(),
            2,
            Some(9),
            vec![record(Status::Fail)],
            Some(vec![Timing { index: 0, micros: 1234 }]),
        );
        let text = render_structured(&rep);
        assert_eq!(parse_structured(&text).unwrap(), rep);
        assert!(render_text(&rep).contains("1.234 ms"));
        assert!(!render_text(&rep.without_timings()).contains("timings"));
    }
}

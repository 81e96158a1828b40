//! Outcome records shared by validators and identity suites.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// A bounded search was inconclusive.
    Unknown,
    /// The clause is topological and only recorded as declared.
    DeclaredOnly,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unknown => "UNKNOWN",
            Status::DeclaredOnly => "DECLARED-ONLY",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub probes: usize,
    /// Witness on success, first counterexample on failure.
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, anchor: &str, status: Status, probes: usize, detail: impl Into<String>) -> Self {
        Check { name: name.into(), anchor: anchor.into(), status, probes, detail: detail.into() }
    }

    /// PASS after `probes` successful probes, or FAIL with the first counterexample.
    pub fn from_outcome(name: &str, anchor: &str, probes: usize, failure: Option<String>) -> Self {
        match failure {
            None => Check::new(name, anchor, Status::Pass, probes, ""),
            Some(d) => Check::new(name, anchor, Status::Fail, probes, d),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn status_of(&self, name: &str) -> Option<Status> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }
}

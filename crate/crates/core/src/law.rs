use std::fmt;

use serde::Serialize;

/// Outcome of checking one algebraic or order-theoretic law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub passed: bool,
    /// Element ids of a counterexample, empty when the law holds.
    pub witness: Vec<String>,
}

impl LawReport {
    pub fn pass(law: impl Into<String>) -> Self {
        LawReport {
            law: law.into(),
            passed: true,
            witness: Vec::new(),
        }
    }

    pub fn fail(law: impl Into<String>, witness: Vec<String>) -> Self {
        LawReport {
            law: law.into(),
            passed: false,
            witness,
        }
    }

    pub(crate) fn from_witness(law: impl Into<String>, witness: Option<Vec<String>>) -> Self {
        match witness {
            None => LawReport::pass(law),
            Some(w) => LawReport::fail(law, w),
        }
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "PASS {}", self.law)
        } else {
            write!(f, "FAIL {} witness ({})", self.law, self.witness.join(", "))
        }
    }
}

pub fn all_passed(reports: &[LawReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

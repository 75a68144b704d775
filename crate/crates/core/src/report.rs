//! Inequality reports shared by every check.

use serde::Serialize;

use crate::constants::NamedConstant;

/// Relative-absolute slack allowed on exact-arithmetic comparisons.
pub const COMPARISON_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// Constant left unspecified; value reported, nothing asserted.
    Reported,
    Skipped,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Reported => "REPORTED",
            Status::Skipped => "SKIPPED",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs ≤ rhs`
    Le,
    /// `lhs ≥ rhs`
    Ge,
}

/// Outcome of checking `lhs ≤ rhs` (or `lhs ≥ rhs` for lower bounds).
///
/// `slack` is positive when the inequality holds with room to spare.
/// `allowance` is the part of `rhs` that accounts for discretization (zero for
/// exact inequalities); `rhs − allowance` is the bound as stated in the
/// continuum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub model: String,
    pub k: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub slack: f64,
    pub allowance: f64,
    pub status: Status,
    pub constants: Vec<NamedConstant>,
    pub note: String,
    /// Audit data (intermediate quantities of certificates).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl InequalityReport {
    /// An asserted inequality: passes iff `lhs ≤ rhs + 1e-9·max(1, |rhs|)`.
    pub fn asserted(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let status = if holds(lhs, rhs) { Status::Pass } else { Status::Fail };
        Self::build(name.into(), lhs, rhs, status)
    }

    /// An asserted lower bound: passes iff `rhs ≤ lhs + 1e-9·max(1, |lhs|)`.
    pub fn asserted_ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let status = if holds(rhs, lhs) { Status::Pass } else { Status::Fail };
        let mut r = Self::build(name.into(), lhs, rhs, status);
        r.relation = Relation::Ge;
        r.slack = lhs - rhs;
        r
    }

    /// A quantity whose governing constant is unspecified.
    pub fn reported(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::build(name.into(), lhs, rhs, Status::Reported)
    }

    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self::build(name.into(), f64::NAN, f64::NAN, Status::Skipped).with_note(note)
    }

    pub fn error(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self::build(name.into(), f64::NAN, f64::NAN, Status::Error).with_note(note)
    }

    fn build(name: String, lhs: f64, rhs: f64, status: Status) -> Self {
        Self {
            name,
            model: String::new(),
            k: None,
            lhs,
            rhs,
            relation: Relation::Le,
            slack: rhs - lhs,
            allowance: 0.0,
            status,
            constants: Vec::new(),
            note: String::new(),
            details: None,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_model(mut self, model: impl Into<String>) -> Self {
        self.model = model.into();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_allowance(mut self, allowance: f64) -> Self {
        self.allowance = allowance;
        self
    }

    pub fn with_constant(mut self, name: &'static str, expression: &'static str, value: f64) -> Self {
        self.constants.push(NamedConstant { name, expression, value });
        self
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + COMPARISON_TOL * rhs.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_tolerance() {
        assert!(InequalityReport::asserted("x", 1.0, 1.0).passed());
        assert!(InequalityReport::asserted("x", 1.0 + 5e-10, 1.0).passed());
        assert!(!InequalityReport::asserted("x", 1.0 + 2e-9, 1.0).passed());
        assert!(InequalityReport::asserted("x", 1e6 + 1e-4, 1e6).passed());
        let r = InequalityReport::reported("c", 2.0, 1.0);
        assert_eq!(r.status, Status::Reported);
        assert_eq!(r.slack, -1.0);
        let r = InequalityReport::asserted_ge("lower", 2.0, 1.5);
        assert!(r.passed());
        assert_eq!(r.slack, 0.5);
        assert!(!InequalityReport::asserted_ge("lower", 1.0, 1.5).passed());
    }
}

//! Named residual records with pass/fail under a tolerance policy.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    /// Passes when the value is below the threshold.
    Small,
    /// Passes when the value exceeds the threshold.
    Nonzero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub expect: Expect,
    /// Fixed threshold; `None` means the report-wide tolerance applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn evaluate(&self, tol: f64) -> Status {
        if self.status == Status::Skipped {
            return Status::Skipped;
        }
        let t = self.threshold.unwrap_or(tol);
        match (self.value, self.expect) {
            (None, _) => Status::Fail,
            (Some(v), Expect::Small) if v < t => Status::Pass,
            (Some(v), Expect::Nonzero) if v > t => Status::Pass,
            _ => Status::Fail,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSet {
    pub checks: Vec<Check>,
}

impl CheckSet {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, name: impl Into<String>, value: f64, expect: Expect, threshold: Option<f64>) {
        let (value, note) = if value.is_finite() {
            (Some(value), None)
        } else {
            (None, Some("non-finite value".to_string()))
        };
        self.checks.push(Check {
            name: name.into(),
            value,
            expect,
            threshold,
            status: Status::Fail,
            note,
        });
    }

    /// Residual judged against the report tolerance.
    pub fn residual(&mut self, name: impl Into<String>, value: f64) {
        self.push(name, value, Expect::Small, None);
    }

    /// Residual judged against its own fixed threshold.
    pub fn residual_at(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.push(name, value, Expect::Small, Some(threshold));
    }

    pub fn nonzero(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.push(name, value, Expect::Nonzero, Some(threshold));
    }

    pub fn skip(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            value: None,
            expect: Expect::Small,
            threshold: None,
            status: Status::Skipped,
            note: Some(reason.into()),
        });
    }

    /// Attach a note to the most recently added check.
    pub fn note(&mut self, text: impl Into<String>) {
        if let Some(c) = self.checks.last_mut() {
            c.note = Some(text.into());
        }
    }

    pub fn extend(&mut self, other: CheckSet) {
        self.checks.extend(other.checks);
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(|c| c.value)
    }

    pub fn finalize(&mut self, tol: f64) {
        for c in &mut self.checks {
            c.status = c.evaluate(tol);
        }
    }

    pub fn all_pass(&self, tol: f64) -> bool {
        self.checks.iter().all(|c| c.evaluate(tol) != Status::Fail)
    }

    pub fn failures(&self, tol: f64) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.evaluate(tol) == Status::Fail).collect()
    }

    pub fn skipped(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Skipped)
    }

    /// Largest value among `Small` checks that use the report tolerance.
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.expect == Expect::Small && c.threshold.is_none())
            .filter_map(|c| c.value)
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_follows_expectation() {
        let mut s = CheckSet::new();
        s.residual("a", 1e-12);
        s.residual_at("b", 0.4, 0.5);
        s.nonzero("c", 1e-3, 1e-6);
        s.skip("d", "a_1 = 0");
        assert!(s.all_pass(1e-8));
        assert!(!s.all_pass(1e-13));
        s.residual("e", f64::NAN);
        assert_eq!(s.failures(1.0).len(), 1);
        assert_eq!(s.skipped().count(), 1);
    }
}

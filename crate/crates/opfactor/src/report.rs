//! Verification reports: named checks with measured values and bounds.

use std::fmt;

/// One verified inequality: `measured <= bound` unless the check is a bare
/// predicate, in which case `passed` carries the verdict and the numbers
/// are informational.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
}

impl CheckResult {
    /// Standard residual-style check: passes iff `measured <= bound`.
    pub fn bounded(name: &'static str, measured: f64, bound: f64) -> Self {
        Self {
            name,
            passed: measured <= bound,
            measured,
            bound,
        }
    }

    /// Predicate check with explanatory numbers.
    pub fn predicate(name: &'static str, passed: bool, measured: f64, bound: f64) -> Self {
        Self {
            name,
            passed,
            measured,
            bound,
        }
    }
}

/// Result of independently re-checking a certificate against raw matrices.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Report with a single failed entry; used when a certificate is so
    /// malformed (wrong shapes) that no numerical check can run.
    pub fn structural_failure(name: &'static str) -> Self {
        Self {
            checks: vec![CheckResult::predicate(name, false, f64::NAN, 0.0)],
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(4)
            .max(5);
        for c in &self.checks {
            writeln!(
                f,
                "  {:<width$}  {}  measured {:>12.4e}  bound {:>12.4e}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.measured,
                c.bound,
                width = width
            )?;
        }
        write!(
            f,
            "  => {}",
            if self.all_passed() {
                "all checks passed"
            } else {
                "VERIFICATION FAILED"
            }
        )
    }
}

//! Named pass/fail/skip outcomes collected into reports.

use serde::Serialize;

use crate::arithmetic::{projective_defect, Mat3};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, detail: detail.into() }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Skipped, detail: reason.into() }
    }

    pub fn failed(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Fail, detail: detail.into() }
    }

    /// Passes when the measured defect is at most `tol`; errors fail.
    pub fn defect(name: impl Into<String>, measured: Result<f64>, tol: f64) -> Self {
        match measured {
            Ok(d) => Check::new(name, d <= tol, format!("defect {d:.2e}")),
            Err(e) => Check::failed(name, e.to_string()),
        }
    }

    /// `m = λn` projectively.
    pub fn projective(name: impl Into<String>, pair: Result<(Mat3, Mat3)>, tol: f64) -> Self {
        Check::defect(name, pair.and_then(|(m, n)| projective_defect(&m, &n)), tol)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed_check(&self) -> bool {
        self.status == Status::Fail
    }
}

/// True when no check failed.
pub fn none_failed(checks: &[Check]) -> bool {
    checks.iter().all(|c| !c.failed_check())
}

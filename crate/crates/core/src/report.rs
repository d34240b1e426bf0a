use serde::Serialize;

use crate::error::Result;

/// Writes i64::MAX, the size of an exact zero, as null.
pub fn exact_as_null<S: serde::Serializer>(v: &i64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *v == i64::MAX {
        s.serialize_none()
    } else {
        s.serialize_i64(*v)
    }
}

/// Elementwise form of `exact_as_null`.
pub fn exact_as_null_vec<S: serde::Serializer>(v: &[i64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|&x| (x != i64::MAX).then_some(x)))
}

/// Outcome of a numerical identity check: the valuation of the difference
/// between two independently computed sides against a pass threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Smallest coefficient valuation of lhs − rhs over all cases
    /// (i64::MAX when every difference was exactly zero, written as null).
    #[serde(serialize_with = "exact_as_null")]
    pub residual: i64,
    pub threshold: i64,
    pub passed: bool,
    /// First error raised by a case, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, residual: i64, threshold: i64) -> Self {
        let passed = residual >= threshold;
        CheckReport {
            name: name.into(),
            cases: 1,
            failures: usize::from(!passed),
            residual,
            threshold,
            passed,
            error: None,
        }
    }
}

/// Accumulates the cases of one identity into a report. A case that errors
/// counts as a failure.
#[derive(Clone, Debug)]
pub struct Tally {
    name: String,
    threshold: i64,
    cases: usize,
    failures: usize,
    worst: i64,
    error: Option<String>,
}

impl Tally {
    pub fn new(name: impl Into<String>, threshold: i64) -> Self {
        Tally { name: name.into(), threshold, cases: 0, failures: 0, worst: i64::MAX, error: None }
    }

    fn fail(&mut self, e: crate::error::Error) {
        self.failures += 1;
        self.error.get_or_insert_with(|| e.to_string());
    }

    /// A case whose outcome is the residual valuation of lhs − rhs.
    pub fn residual(&mut self, r: Result<i64>) {
        self.cases += 1;
        match r {
            Ok(v) => {
                self.worst = self.worst.min(v);
                if v < self.threshold {
                    self.failures += 1;
                }
            }
            Err(e) => self.fail(e),
        }
    }

    /// A case whose outcome is a yes/no verdict.
    pub fn holds(&mut self, r: Result<bool>) {
        self.cases += 1;
        match r {
            Ok(true) => {}
            Ok(false) => self.failures += 1,
            Err(e) => self.fail(e),
        }
    }

    pub fn finish(self) -> CheckReport {
        CheckReport {
            passed: self.failures == 0 && self.cases > 0,
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            residual: self.worst,
            threshold: self.threshold,
            error: self.error,
        }
    }
}

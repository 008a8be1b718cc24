//! Reporting helpers for the `acceptance` test target.
//!
//! Each criterion is a list of checks; it passes when every check passes.
//! The runner prints one `PASS`/`FAIL` line per criterion followed by the
//! individual checks, and maps the outcome to the process exit code.

use std::fmt::Display;
use std::process::ExitCode;
use std::time::{Duration, Instant};

#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(label: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            pass,
            detail: detail.into(),
        }
    }

    /// `|value| <= bound` style check with both numbers in the detail.
    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(label, value <= bound, format!("{value:.3e} <= {bound:.0e}"))
    }

    /// A check that reports but never fails.
    pub fn note(label: impl Into<String>, detail: impl Display) -> Self {
        Self::new(label, true, detail.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: usize,
    pub title: String,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Times `f` and wraps its checks. An error becomes a single failing check.
pub fn criterion<E: Display>(id: usize, title: &str, f: impl FnOnce() -> Result<Vec<Check>, E>) -> Criterion {
    let start = Instant::now();
    let checks = f().unwrap_or_else(|e| vec![Check::new("error", false, e.to_string())]);
    Criterion {
        id,
        title: title.to_string(),
        checks,
        elapsed: start.elapsed(),
    }
}

pub fn render(c: &Criterion) -> String {
    let mut out = format!(
        "{} criterion {:>2}: {} ({:.2} s)\n",
        if c.passed() { "PASS" } else { "FAIL" },
        c.id,
        c.title,
        c.elapsed.as_secs_f64()
    );
    for check in &c.checks {
        out.push_str(&format!(
            "      [{}] {}: {}\n",
            if check.pass { "ok" } else { "x" },
            check.label,
            check.detail
        ));
    }
    out
}

pub fn report(criteria: &[Criterion]) -> ExitCode {
    for c in criteria {
        print!("{}", render(c));
    }
    let passed = criteria.iter().filter(|c| c.passed()).count();
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

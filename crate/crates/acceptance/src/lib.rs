//! Reporting helpers for the acceptance run: one line per criterion with a
//! pass/fail verdict, elapsed time against its budget, and the first few
//! failures.

use std::fmt;
use std::time::Duration;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

/// How many individual failures are echoed under a red criterion.
pub const SHOWN_FAILURES: usize = 12;

/// Result of checking one criterion.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Short description of what was checked.
    pub summary: String,
    /// Every violated check, in discovery order.
    pub failures: Vec<String>,
    /// Informational lines shown whether or not the criterion passed.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(summary: impl Into<String>) -> Self {
        Self { summary: summary.into(), ..Self::default() }
    }

    /// Record `message` as a failure unless `ok`.
    pub fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(message());
        }
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.failures.push(message.into());
    }

    pub fn note(&mut self, message: impl Into<String>) {
        self.notes.push(message.into());
    }
}

/// A finished criterion with its timing.
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub outcome: Outcome,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.outcome.failures.is_empty() && self.elapsed <= self.budget
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "criterion {} {status}: {} ({}; {:.1?} of {:.0?})",
            self.id, self.title, self.outcome.summary, self.elapsed, self.budget
        )?;
        if self.elapsed > self.budget {
            writeln!(f, "    over the time budget")?;
        }
        for line in &self.outcome.notes {
            writeln!(f, "    note: {line}")?;
        }
        for line in self.outcome.failures.iter().take(SHOWN_FAILURES) {
            writeln!(f, "    failed: {line}")?;
        }
        if self.outcome.failures.len() > SHOWN_FAILURES {
            writeln!(f, "    ... {} more failures", self.outcome.failures.len() - SHOWN_FAILURES)?;
        }
        Ok(())
    }
}

/// `log2(x)` for a positive integer too large for `f64`.
pub fn log2_big(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "log2 of a nonpositive integer");
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    shift as f64 + top.log2()
}

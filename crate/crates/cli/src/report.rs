//! Machine-readable check reports: one JSON object per check on standard
//! output, or human text with `--pretty`. A failing check always carries
//! a counterexample in its details; an error always carries a message.

use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub instance: String,
    pub status: Status,
    pub details: serde_json::Value,
    pub wall_ms: u128,
}

impl CheckReport {
    pub fn pass(check: &str, instance: String, details: serde_json::Value) -> Self {
        CheckReport {
            check: check.into(),
            instance,
            status: Status::Pass,
            details,
            wall_ms: 0,
        }
    }

    pub fn fail(
        check: &str,
        instance: String,
        counterexample: serde_json::Value,
        details: serde_json::Value,
    ) -> Self {
        let mut details = details;
        if !details.is_object() {
            details = serde_json::json!({});
        }
        details["counterexample"] = counterexample;
        CheckReport {
            check: check.into(),
            instance,
            status: Status::Fail,
            details,
            wall_ms: 0,
        }
    }

    pub fn error(check: &str, instance: String, message: String) -> Self {
        CheckReport {
            check: check.into(),
            instance,
            status: Status::Error,
            details: serde_json::json!({ "message": message }),
            wall_ms: 0,
        }
    }

    pub fn render_pretty(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        format!(
            "[{tag}] {} ({}) — {} ({} ms)",
            self.check, self.instance, self.details, self.wall_ms
        )
    }
}

/// Run a check body under a wall clock, converting an error result into
/// an error report.
pub fn timed(
    check: &str,
    instance: String,
    body: impl FnOnce() -> Result<CheckReport, String>,
) -> CheckReport {
    let start = Instant::now();
    let mut report = match body() {
        Ok(r) => r,
        Err(message) => CheckReport::error(check, instance, message),
    };
    report.wall_ms = start.elapsed().as_millis();
    report
}

/// Print reports (ordered by check name then instance) and compute the
/// process exit code: 0 when everything passed, 1 otherwise.
pub fn emit(mut reports: Vec<CheckReport>, pretty: bool) -> u8 {
    reports.sort_by(|a, b| (&a.check, &a.instance).cmp(&(&b.check, &b.instance)));
    let mut all_pass = true;
    for r in &reports {
        all_pass &= r.status == Status::Pass;
        if pretty {
            println!("{}", r.render_pretty());
        } else {
            println!("{}", serde_json::to_string(r).expect("report serializes"));
        }
    }
    if all_pass {
        0
    } else {
        1
    }
}

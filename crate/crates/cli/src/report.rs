//! Suite reports: an ordered list of named checks with a deterministic text
//! and JSON rendering (no timestamps, stable field order, checks sorted by
//! id), so identical inputs produce byte-identical output.

use serde::Serialize;

#[derive(Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub description: String,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub order: i64,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, order: i64) -> Self {
        SuiteReport { suite: suite.to_string(), order, checks: Vec::new(), pass: true }
    }

    pub fn record(&mut self, id: &str, description: &str, pass: bool) {
        self.checks.push(CheckOutcome {
            id: id.to_string(),
            description: description.to_string(),
            pass,
        });
    }

    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{} {} {}\n", c.id, verdict, c.description));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{}: {} ({}/{} checks passed)\n",
            self.suite,
            verdict,
            passed,
            self.checks.len()
        ));
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Tracks the targeted fault-injection flag.  A check asks `corrupt(id)`
/// exactly once; the flag is considered consumed when its id was seen, and
/// an unconsumed flag is a usage error (unknown check id).
pub struct Mutator<'a> {
    target: Option<&'a str>,
    hit: bool,
}

impl<'a> Mutator<'a> {
    pub fn new(target: Option<&'a str>) -> Self {
        Mutator { target, hit: false }
    }

    pub fn corrupt(&mut self, id: &str) -> bool {
        if self.target == Some(id) {
            self.hit = true;
            true
        } else {
            false
        }
    }

    pub fn consumed(&self) -> bool {
        self.target.is_none() || self.hit
    }

    pub fn target(&self) -> Option<&'a str> {
        self.target
    }
}

//! Command reports: a list of named checks with witnesses plus free-form
//! sections, rendered for people or as JSON.

use std::fmt::Write;

use serde::Serialize;

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub title: String,
    pub lines: Vec<String>,
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub command: String,
    pub target: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<Section>,
    /// Raw output such as a DOT graph.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunReport {
    pub fn new(command: &str, target: &str) -> RunReport {
        RunReport { command: command.into(), target: target.into(), passed: true, checks: Vec::new(), sections: Vec::new(), output: None }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, witnesses: Vec<String>) {
        self.passed &= passed;
        self.checks.push(Check { name: name.into(), passed, witnesses });
    }

    /// A check that passes when `witnesses` is empty.
    pub fn expect_none(&mut self, name: impl Into<String>, witnesses: Vec<String>) {
        let ok = witnesses.is_empty();
        self.check(name, ok, witnesses);
    }

    pub fn section(&mut self, title: impl Into<String>, lines: Vec<String>) {
        self.sections.push(Section { title: title.into(), lines });
    }

    pub fn find(&self, prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name.starts_with(prefix))
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{} {}: {verdict}", self.command, self.target);
        for c in &self.checks {
            let _ = writeln!(out, "  [{}] {}", if c.passed { "pass" } else { "FAIL" }, c.name);
            for w in &c.witnesses {
                for (k, line) in w.lines().enumerate() {
                    let _ = writeln!(out, "      {}{line}", if k == 0 { "- " } else { "  " });
                }
            }
        }
        for s in &self.sections {
            let _ = writeln!(out, "{}:", s.title);
            for l in &s.lines {
                let _ = writeln!(out, "  {l}");
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_checks() {
        let mut r = RunReport::new("validate", "x");
        r.check("one", true, vec![]);
        assert!(r.passed);
        r.expect_none("two", vec!["p in X".into()]);
        assert!(!r.passed);
        let text = r.render_human();
        assert!(text.starts_with("validate x: FAIL\n"));
        assert!(text.contains("      - p in X"));
        let json: serde_json::Value = serde_json::from_str(&r.render_json()).unwrap();
        assert_eq!(json["checks"][1]["witnesses"][0], "p in X");
    }
}

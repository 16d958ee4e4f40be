//! Verdict lists shared by every checker.

use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub passed: bool,
    /// Present iff the check failed.
    pub witness: Option<String>,
    /// Informational checks are reported but never affect the overall status.
    pub informational: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), checks: Vec::new() }
    }

    /// Records a check that failed iff `witness` is `Some`.
    pub fn record(&mut self, id: impl Into<String>, witness: Option<String>) {
        self.checks.push(Check { id: id.into(), passed: witness.is_none(), witness, informational: false });
    }

    pub fn record_info(&mut self, id: impl Into<String>, witness: Option<String>) {
        self.checks.push(Check { id: id.into(), passed: witness.is_none(), witness, informational: true });
    }

    /// Appends the checks of `other`, prefixing their ids.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.id = format!("{prefix}{}", c.id);
            self.checks.push(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn passed(&self, id: &str) -> bool {
        self.get(id).is_some_and(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed && !c.informational)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite: {}\n", self.suite);
        for c in &self.checks {
            let tag = match (c.passed, c.informational) {
                (true, false) => "PASS",
                (false, false) => "FAIL",
                (true, true) => "info PASS",
                (false, true) => "info FAIL",
            };
            match &c.witness {
                Some(w) => out.push_str(&format!("{tag} {}: {w}\n", c.id)),
                None => out.push_str(&format!("{tag} {}\n", c.id)),
            }
        }
        let failed = self.failures().count();
        if failed == 0 {
            out.push_str("status: pass\n");
        } else {
            out.push_str(&format!("status: fail ({failed} failing)\n"));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({
                    "id": c.id,
                    "verdict": if c.passed { "pass" } else { "fail" },
                });
                if let Some(w) = &c.witness {
                    v["witness"] = json!(w);
                }
                if c.informational {
                    v["informational"] = json!(true);
                }
                v
            })
            .collect();
        json!({
            "suite": self.suite,
            "status": if self.all_passed() { "pass" } else { "fail" },
            "checks": checks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn informational_failures_do_not_fail_the_report() {
        let mut r = Report::new("x");
        r.record("a", None);
        r.record_info("b", Some("w".into()));
        assert!(r.all_passed());
        r.record("c", Some("bad".into()));
        assert!(!r.all_passed());
        assert_eq!(r.failures().count(), 1);
        assert_eq!(r.to_json()["status"], "fail");
        assert!(r.to_text().contains("FAIL c: bad"));
    }
}

//! Versioned reports for the verification suites, as JSON or text.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    /// Command path, e.g. "verify structure".
    pub suite: String,
    pub ok: bool,
    /// One deterministic line.
    pub summary: String,
    pub details: serde_json::Value,
    /// Wall time, present only when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub max_weight: i64,
    pub seed: u64,
    pub ok: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn new(command: &str, max_weight: i64, seed: u64, suites: Vec<SuiteReport>) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            tool: "vltau".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            max_weight,
            seed,
            ok: suites.iter().all(|s| s.ok),
            suites,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.suites {
            let verdict = if r.ok { "pass" } else { "FAIL" };
            s.push_str(&format!("{}: {verdict}, {}", r.suite, r.summary));
            if let Some(ms) = r.millis {
                s.push_str(&format!(" ({ms} ms)"));
            }
            s.push('\n');
        }
        s.push_str(&format!("overall: {}\n", if self.ok { "pass" } else { "FAIL" }));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suite(ok: bool, millis: Option<u128>) -> SuiteReport {
        SuiteReport { suite: "fusion check".into(), ok, summary: "x".into(), details: serde_json::Value::Null, millis }
    }

    #[test]
    fn rendering() {
        let r = Report::new("fusion check", 6, 0, vec![suite(true, None)]);
        assert_eq!(r.to_text(), "fusion check: pass, x\noverall: pass\n");
        assert!(!r.to_json().contains("millis"));
        assert!(r.to_json().contains("\"schema\": 1"));
        let r = Report::new("all", 6, 0, vec![suite(true, Some(5)), suite(false, None)]);
        assert!(!r.ok);
        assert!(r.to_text().contains("(5 ms)"));
        assert!(r.to_text().ends_with("overall: FAIL\n"));
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CheckResult, ConditionFit};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Verdicts of one or more verification runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    /// Free-form grouping label, typically the space.
    #[serde(default)]
    pub section: String,
    pub checks: Vec<CheckResult>,
    #[serde(default)]
    pub conditions: Vec<ConditionFit>,
}

fn condition_key(f: &ConditionFit) -> String {
    let text = serde_json::to_string(f).unwrap_or_default();
    format!("{}#{:016x}", f.condition_id.as_str(), fnv(&text))
}

fn fnv(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl VerificationReport {
    pub fn new(section: impl Into<String>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            section: section.into(),
            checks: Vec::new(),
            conditions: Vec::new(),
        }
    }

    /// Order-independent merge: entries are keyed by id and inputs hash,
    /// duplicates collapse, and the result is sorted by key.
    pub fn merge(parts: impl IntoIterator<Item = VerificationReport>) -> Result<VerificationReport> {
        let mut checks = BTreeMap::new();
        let mut conditions = BTreeMap::new();
        let mut sections = std::collections::BTreeSet::new();
        for p in parts {
            if p.schema_version != REPORT_SCHEMA_VERSION {
                return Err(Error::Format(format!(
                    "report schema version {} (expected {REPORT_SCHEMA_VERSION})",
                    p.schema_version
                )));
            }
            if !p.section.is_empty() {
                sections.insert(p.section.clone());
            }
            for c in p.checks {
                let key = (p.section.clone(), c.key());
                checks.insert(key, c);
            }
            for f in p.conditions {
                conditions.insert((p.section.clone(), condition_key(&f)), f);
            }
        }
        let mut out = VerificationReport::new(sections.into_iter().collect::<Vec<_>>().join("+"));
        out.checks = checks.into_values().collect();
        out.conditions = conditions.into_values().collect();
        Ok(out)
    }

    pub fn all_mandatory_pass(&self) -> bool {
        self.checks.iter().filter(|c| c.mandatory).all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.mandatory && !c.pass).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: VerificationReport = serde_json::from_str(text)?;
        if r.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "report schema version {} (expected {REPORT_SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        Ok(r)
    }

    /// Markdown tables of checks and condition fits.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        if !self.section.is_empty() {
            let _ = writeln!(s, "## {}\n", self.section);
        }
        if !self.checks.is_empty() {
            s.push_str("| check | lhs | rhs | slack | tolerance | pass | note |\n");
            s.push_str("|---|---|---|---|---|---|---|\n");
            for c in &self.checks {
                let _ = writeln!(
                    s,
                    "| {}{} | {:.6e} | {:.6e} | {:.3e} | {:.3} | {} | {} |",
                    c.check_id,
                    if c.mandatory { "" } else { " (optional)" },
                    c.lhs,
                    c.rhs,
                    c.slack,
                    c.tolerance,
                    if c.pass { "yes" } else { "NO" },
                    c.note
                );
            }
        }
        if !self.conditions.is_empty() {
            s.push_str("\n| condition | space | c_lower | c_upper | ratio | cap | samples | pass |\n");
            s.push_str("|---|---|---|---|---|---|---|---|\n");
            for f in &self.conditions {
                let _ = writeln!(
                    s,
                    "| {} | {} | {:.6e} | {:.6e} | {:.4} | {} | {} | {} |",
                    f.condition_id.as_str(),
                    f.space,
                    f.c_lower,
                    f.c_upper,
                    f.ratio(),
                    f.cap,
                    f.sample_size,
                    if f.pass { "yes" } else { "NO" }
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(ids: &[(&str, u64)]) -> VerificationReport {
        let mut r = VerificationReport::new("interval");
        for (id, seed) in ids {
            r.checks.push(CheckResult::new(*id, 1.0, 2.0, 0.0, 1.0).input("seed", seed));
        }
        r
    }

    #[test]
    fn merge_is_order_independent() {
        let a = report(&[("a", 1), ("b", 1)]);
        let b = report(&[("c", 2), ("a", 1)]);
        let ab = VerificationReport::merge([a.clone(), b.clone()]).unwrap();
        let ba = VerificationReport::merge([b, a]).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab.checks.len(), 3);
    }

    #[test]
    fn json_round_trip_and_version_guard() {
        let r = report(&[("a", 1)]);
        let back = VerificationReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let mut bad = r.clone();
        bad.schema_version = 99;
        assert!(VerificationReport::from_json(&bad.to_json().unwrap()).is_err());
        assert!(r.to_markdown().contains("| a |"));
    }
}

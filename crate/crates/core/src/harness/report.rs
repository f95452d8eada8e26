use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::CampaignConfig;
use crate::error::{Error, Result};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Convention notes attached to every report.
pub const CONVENTION_NOTES: [&str; 2] = [
    "chi of a ratio is chi(num) * conj(chi(den)); lambda with any linear factor sharing a prime with q contributes 0",
    "right-hand sides are main terms without the q^{o(1)} factor; ratios are measured constants",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub label: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `None` when undefined.
    pub ratio: Option<f64>,
    /// Number of summands, for the triangle-inequality sanity check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<f64>,
    pub sanity: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<BTreeMap<String, Value>>,
}

impl Record {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            Some(lhs / rhs)
        } else if lhs == 0.0 {
            Some(0.0)
        } else {
            None
        };
        Record {
            label: label.into(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            ratio: ratio.filter(|r| r.is_finite()),
            terms: None,
            sanity: lhs.is_finite() && rhs.is_finite(),
            diagnostics: None,
        }
    }

    pub fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.params
            .insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    /// Records the term count and checks `lhs <= terms`.
    pub fn terms(mut self, terms: f64) -> Self {
        self.terms = Some(terms);
        self.sanity &= self.lhs <= terms * (1.0 + 1e-12) + 1e-9;
        self
    }

    pub fn require(mut self, ok: bool) -> Self {
        self.sanity &= ok;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub max_ratio: Option<f64>,
    pub argmax: Option<usize>,
    pub sanity_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub config: CampaignConfig,
    pub records: Vec<Record>,
    pub aggregate: Aggregate,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Aggregates the records; passes when every record is sane and the
    /// maximal ratio stays within the configured threshold.
    pub fn assemble(config: CampaignConfig, records: Vec<Record>, extra_notes: Vec<String>) -> Self {
        let mut max_ratio: Option<f64> = None;
        let mut argmax = None;
        for (i, r) in records.iter().enumerate() {
            if let Some(x) = r.ratio {
                if max_ratio.is_none_or(|m| x > m) {
                    max_ratio = Some(x);
                    argmax = Some(i);
                }
            }
        }
        let sanity_failures = records.iter().filter(|r| !r.sanity).count();
        let within = match (config.threshold, max_ratio) {
            (Some(t), Some(m)) => m <= t,
            _ => true,
        };
        let mut notes: Vec<String> = CONVENTION_NOTES.iter().map(|s| s.to_string()).collect();
        notes.extend(extra_notes);
        VerificationReport {
            version: REPORT_VERSION.to_string(),
            aggregate: Aggregate {
                count: records.len(),
                max_ratio,
                argmax,
                sanity_failures,
                threshold: config.threshold,
            },
            pass: sanity_failures == 0 && within,
            config,
            records,
            notes,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["index", "label", "lhs", "rhs", "ratio", "terms", "sanity", "params"])
            .map_err(io)?;
        for (i, r) in self.records.iter().enumerate() {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                i.to_string(),
                r.label.clone(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                opt(r.ratio),
                opt(r.terms),
                r.sanity.to_string(),
                serde_json::to_string(&r.params).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

pub fn emit_report(report: &VerificationReport, path: &Path) -> Result<()> {
    fs::write(path, report.to_json())?;
    Ok(())
}

pub fn emit_csv(report: &VerificationReport, path: &Path) -> Result<()> {
    fs::write(path, report.to_csv()?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Target;

    #[test]
    fn aggregate_and_threshold() {
        let recs = vec![
            Record::new("a", 1.0, 2.0).terms(5.0),
            Record::new("b", 3.0, 2.0).terms(5.0),
            Record::new("c", 0.0, 0.0),
        ];
        let mut cfg = CampaignConfig::new(Target::Weil);
        cfg.threshold = Some(2.0);
        let rep = VerificationReport::assemble(cfg.clone(), recs.clone(), vec![]);
        assert_eq!(rep.aggregate.max_ratio, Some(1.5));
        assert_eq!(rep.aggregate.argmax, Some(1));
        assert!(rep.pass);
        cfg.threshold = Some(1.0);
        assert!(!VerificationReport::assemble(cfg, recs, vec![]).pass);
    }

    #[test]
    fn sanity_bound() {
        assert!(!Record::new("x", 6.0, 1.0).terms(5.0).sanity);
        assert!(Record::new("x", 5.0, 1.0).terms(5.0).sanity);
    }

    #[test]
    fn json_and_csv() {
        let rep = VerificationReport::assemble(
            CampaignConfig::new(Target::Phi),
            vec![Record::new("a", 1.0, 2.0).param("q", 7u64)],
            vec!["extra".into()],
        );
        let j = rep.to_json();
        let v: Value = serde_json::from_str(&j).unwrap();
        for k in ["version", "config", "records", "aggregate", "notes", "pass"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        let back: VerificationReport = serde_json::from_str(&j).unwrap();
        assert_eq!(back, rep);
        let csv = rep.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.contains("\"{\"\"q\"\":7}\""));
    }
}

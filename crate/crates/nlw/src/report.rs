//! `report.json` and CSV outputs.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Metric {
    Scalar(f64),
    Array(Vec<f64>),
    Text(String),
}

impl From<f64> for Metric {
    fn from(x: f64) -> Self {
        Self::Scalar(x)
    }
}

impl From<usize> for Metric {
    fn from(x: usize) -> Self {
        Self::Scalar(x as f64)
    }
}

impl From<Vec<f64>> for Metric {
    fn from(x: Vec<f64>) -> Self {
        Self::Array(x)
    }
}

impl From<String> for Metric {
    fn from(x: String) -> Self {
        Self::Text(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    /// The quantity that was tested, when there is a single one.
    pub value: Option<f64>,
    /// The pass condition, in words.
    pub tolerance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub seed: u64,
}

impl Provenance {
    pub fn now(seed: u64) -> Self {
        Self {
            toolkit: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub metrics: BTreeMap<String, Metric>,
    pub provenance: Provenance,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        let seed = config.seed;
        Self {
            config,
            metrics: BTreeMap::new(),
            provenance: Provenance::now(seed),
            verdicts: BTreeMap::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: impl Into<Metric>) {
        self.metrics.insert(name.into(), value.into());
    }

    pub fn verdict(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        value: Option<f64>,
        tolerance: impl Into<String>,
    ) {
        self.verdicts.insert(
            name.into(),
            Verdict {
                passed,
                value,
                tolerance: tolerance.into(),
            },
        );
    }

    /// True when every verdict passed (vacuously for none).
    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| v.passed)
    }

    /// Pretty JSON with object keys sorted at every level.
    pub fn to_json(&self) -> String {
        // serde_json's Map is ordered by key unless `preserve_order` is enabled
        let value = serde_json::to_value(self).expect("report is serializable");
        serde_json::to_string_pretty(&value).expect("value is serializable") + "\n"
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())
    }
}

/// A CSV table of numbers with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Shortest round-trip form of every value; negative zero is written as `0.0`.
    pub fn write(&self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut out = csv::Writer::from_path(path)?;
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|x| format!("{:?}", x + 0.0)))?;
        }
        out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PartialConfig;

    #[test]
    fn json_keys_are_sorted() {
        let cfg = PartialConfig::from_json(r#"{"experiment":"sample"}"#)
            .unwrap()
            .resolve()
            .unwrap();
        let mut report = Report::new(cfg);
        report.metric("zeta", 1.0);
        report.metric("alpha_mean", 2.0);
        report.verdict("b", true, Some(0.0), "x");
        report.verdict("a", false, None, "y");
        let text = report.to_json();
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(
            pos("config") < pos("metrics")
                && pos("metrics") < pos("provenance")
                && pos("provenance") < pos("verdicts")
        );
        assert!(pos("alpha_mean") < pos("zeta"));
        assert!(pos("M") < pos("N") && pos("N") < pos("alpha"));
        assert!(!report.passed());
    }

    proptest::proptest! {
        #[test]
        fn csv_values_roundtrip_exactly(row in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::ZERO, 1..8)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.csv");
            let mut table = Table::new((0..row.len()).map(|k| format!("x{k}")).collect());
            table.push(row.clone());
            table.write(&path).unwrap();
            let mut reader = csv::Reader::from_path(&path).unwrap();
            let record = reader.records().next().unwrap().unwrap();
            let back: Vec<f64> = record.iter().map(|v| v.parse().unwrap()).collect();
            proptest::prop_assert_eq!(back, row.iter().map(|x| x + 0.0).collect::<Vec<_>>());
        }
    }
}

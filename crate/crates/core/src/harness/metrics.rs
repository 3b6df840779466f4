use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const METRICS_COLUMNS: [&str; 16] = [
    "scenario",
    "variant",
    "step",
    "epoch",
    "wall_seconds",
    "loss",
    "mae",
    "uplink",
    "downlink",
    "edge",
    "objective",
    "makespan",
    "expenditure",
    "ratio",
    "accuracy",
    "value",
];

/// One measurement event. Unused fields stay `None` and render as empty cells.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub scenario: String,
    /// Which solver, model or sweep point produced the row.
    pub variant: String,
    pub step: Option<u64>,
    pub epoch: Option<u64>,
    pub wall_seconds: Option<f64>,
    pub loss: Option<f64>,
    pub mae: Option<f64>,
    pub uplink: Option<u64>,
    pub downlink: Option<u64>,
    pub edge: Option<u64>,
    pub objective: Option<f64>,
    pub makespan: Option<f64>,
    pub expenditure: Option<f64>,
    pub ratio: Option<f64>,
    pub accuracy: Option<f64>,
    /// Free numeric slot, e.g. the swept parameter value.
    pub value: Option<f64>,
}

impl MetricsRecord {
    pub fn new(scenario: &str, variant: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            variant: variant.into(),
            ..Self::default()
        }
    }

    fn cells(&self) -> Vec<String> {
        let int = |v: Option<u64>| v.map_or_else(String::new, |v| v.to_string());
        let real = |v: Option<f64>| v.map_or_else(String::new, format_real);
        vec![
            self.scenario.clone(),
            self.variant.clone(),
            int(self.step),
            int(self.epoch),
            real(self.wall_seconds),
            real(self.loss),
            real(self.mae),
            int(self.uplink),
            int(self.downlink),
            int(self.edge),
            real(self.objective),
            real(self.makespan),
            real(self.expenditure),
            real(self.ratio),
            real(self.accuracy),
            real(self.value),
        ]
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.11e}")
}

/// Renders records as CSV with the fixed column order of [`METRICS_COLUMNS`].
pub fn metrics_csv(records: &[MetricsRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_COLUMNS)?;
    for r in records {
        w.write_record(r.cells())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::format("metrics", e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::format("metrics", e.to_string()))
}

/// Writes `records` to `path`. An empty record list is an error unless `allow_empty`.
pub fn emit_metrics(path: impl AsRef<Path>, records: &[MetricsRecord], allow_empty: bool) -> Result<()> {
    if records.is_empty() && !allow_empty {
        return Err(Error::invalid("no metrics records to write"));
    }
    fs::write(path, metrics_csv(records)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(i: u64) -> MetricsRecord {
        MetricsRecord {
            step: Some(i),
            loss: Some(1.0 / (i as f64 + 3.0)),
            ..MetricsRecord::new("train", "autoencoder")
        }
    }

    #[test]
    fn one_record() {
        let text = metrics_csv(&[record(0)]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], METRICS_COLUMNS.join(","));
        assert_eq!(lines[1], "train,autoencoder,0,,,3.33333333333e-1,,,,,,,,,,");
    }

    #[test]
    fn precision_and_round_trip() {
        let s = format_real(std::f64::consts::PI);
        let digits = s.split('e').next().unwrap().replace('.', "");
        assert!(digits.len() >= 9);
        assert!((s.parse::<f64>().unwrap() - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn files_are_byte_identical_and_sized() {
        let dir = tempfile::tempdir().unwrap();
        let records: Vec<_> = (0..1000).map(record).collect();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        emit_metrics(&a, &records, false).unwrap();
        emit_metrics(&b, &records, false).unwrap();
        let text = fs::read_to_string(&a).unwrap();
        assert_eq!(text, fs::read_to_string(&b).unwrap());
        assert_eq!(text.lines().count(), 1001);
    }

    #[test]
    fn empty_and_unwritable() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_metrics(dir.path().join("e.csv"), &[], false).is_err());
        emit_metrics(dir.path().join("e.csv"), &[], true).unwrap();
        assert!(emit_metrics(dir.path().join("missing/e.csv"), &[record(1)], false).is_err());
    }
}

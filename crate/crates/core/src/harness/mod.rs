//! Configuration-driven experiment runs that write CSV metrics and a run manifest.
//!
//! A run directory always holds `metrics.csv` (byte-reproducible from the manifest),
//! `timing.csv` (wall-clock seconds, not reproducible) and `manifest.toml`, plus any
//! scenario-specific exports.

mod classifier;
mod config;
mod manifest;
mod metrics;
mod run;
mod scenarios;
mod schedule_runs;

pub use classifier::{blobs, train_classifier, Classifier};
pub use config::{
    ClassifierSpec, DatasetKind, DatasetSpec, ExperimentConfig, GradcheckSpec, ScheduleSpec, SensitivitySpec,
    TopologyKind, TopologySpec, SCENARIOS,
};
pub use manifest::Manifest;
pub use metrics::{emit_metrics, format_real, metrics_csv, MetricsRecord, METRICS_COLUMNS};
pub use run::{run_scenario, HarnessError, RunOutcome};
pub use scenarios::{dcsnet_like_config, DCSNET_LIKE_DECODER, DCSNET_LIKE_LATENT};
pub use schedule_runs::random_instance;

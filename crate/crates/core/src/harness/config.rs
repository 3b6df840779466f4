use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codec::AutoencoderConfig;
use crate::nn::SgdConfig;
use crate::{Error, Result};

pub const SCENARIOS: [&str; 7] = ["train", "aggregate", "schedule", "sensitivity", "classify", "example1", "gradcheck"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Sparse,
    Field,
    Blobs,
    Mnist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub samples: usize,
    /// Sample length for generated data; must equal `autoencoder.n_devices`.
    pub dim: usize,
    pub sparsity: usize,
    pub correlation_length: f64,
    pub classes: usize,
    pub spread: f64,
    /// IDX image and label paths for `mnist`.
    pub images: String,
    pub labels: String,
    pub limit: usize,
    pub train_fraction: f64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            kind: DatasetKind::Sparse,
            samples: 512,
            dim: 64,
            sparsity: 8,
            correlation_length: 2.0,
            classes: 2,
            spread: 0.05,
            images: String::new(),
            labels: String::new(),
            limit: 1000,
            train_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Random,
    Chain,
    Star,
}

/// Cluster layout. The device count is `autoencoder.n_devices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologySpec {
    pub kind: TopologyKind,
    /// Side of the square deployment area.
    pub side: f64,
    pub radio_range: f64,
    /// Hop distance for `chain`, radius for `star`.
    pub spacing: f64,
    pub max_attempts: usize,
    /// Sensing rounds charged on the cluster-to-edge link.
    pub rounds: u64,
    /// Samples pushed through both aggregation paths to check they agree.
    pub probe_samples: usize,
}

impl Default for TopologySpec {
    fn default() -> Self {
        Self {
            kind: TopologyKind::Random,
            side: 100.0,
            radio_range: 30.0,
            spacing: 10.0,
            max_attempts: 1000,
            rounds: 1,
            probe_samples: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSpec {
    /// Instance file; empty means a random-instance sweep.
    pub instance: String,
    pub random_instances: usize,
    pub min_devices: usize,
    pub max_devices: usize,
    pub max_channels: usize,
    pub brute_force_cap: usize,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self {
            instance: String::new(),
            random_instances: 500,
            min_devices: 3,
            max_devices: 8,
            max_channels: 3,
            brute_force_cap: crate::sched::DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivitySpec {
    pub latent_dims: Vec<usize>,
    pub noise_sigmas: Vec<f64>,
    /// Number of hidden decoder layers.
    pub decoder_depths: Vec<usize>,
    pub hidden_width: usize,
}

impl Default for SensitivitySpec {
    fn default() -> Self {
        Self {
            latent_dims: vec![4, 8, 16, 32],
            noise_sigmas: vec![0.0, 0.05, 0.1, 0.2],
            decoder_depths: vec![0, 1, 2],
            hidden_width: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSpec {
    pub hidden: usize,
    pub sgd: SgdConfig,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        Self {
            hidden: 32,
            sgd: SgdConfig {
                learning_rate: 0.1,
                batch_size: 16,
                epochs: 30,
                seed: 0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradcheckSpec {
    pub cases: usize,
    pub max_devices: usize,
    pub max_latent: usize,
    pub max_decoder_layers: usize,
    pub eps: f64,
    pub tolerance: f64,
}

impl Default for GradcheckSpec {
    fn default() -> Self {
        Self {
            cases: 20,
            max_devices: 16,
            max_latent: 8,
            max_decoder_layers: 3,
            eps: 1e-6,
            tolerance: 1e-4,
        }
    }
}

/// Everything a run needs. Serializing it writes every default explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub seed: u64,
    pub out_dir: String,
    /// Fill the `wall_seconds` metrics column. Off by default so metrics files are
    /// byte-reproducible; timings always go to `timing.csv`.
    pub record_wall_time: bool,
    /// Also train the `dcsnet-like` stand-in in the `train` scenario.
    pub compare_dcsnet_like: bool,
    pub dataset: DatasetSpec,
    pub autoencoder: AutoencoderConfig,
    pub topology: TopologySpec,
    pub schedule: ScheduleSpec,
    pub sensitivity: SensitivitySpec,
    pub classifier: ClassifierSpec,
    pub gradcheck: GradcheckSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: "example1".into(),
            seed: 0,
            out_dir: "out".into(),
            record_wall_time: false,
            compare_dcsnet_like: false,
            dataset: DatasetSpec::default(),
            autoencoder: AutoencoderConfig::default(),
            topology: TopologySpec::default(),
            schedule: ScheduleSpec::default(),
            sensitivity: SensitivitySpec::default(),
            classifier: ClassifierSpec::default(),
            gradcheck: GradcheckSpec::default(),
        }
    }
}

#[derive(Deserialize)]
struct ManifestShape {
    config: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn for_scenario(scenario: &str) -> Self {
        Self {
            scenario: scenario.into(),
            ..Self::default()
        }
    }

    /// Parses a config document, or the `[config]` table of a run manifest.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Table = toml::from_str(text).map_err(|e| Error::format("config", e.to_string()))?;
        let parsed = if value.get("config").is_some_and(toml::Value::is_table) {
            toml::from_str::<ManifestShape>(text).map(|m| m.config)
        } else {
            toml::from_str::<Self>(text)
        };
        parsed.map_err(|e| Error::format("config", e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::format("config", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            return Err(Error::invalid(format!(
                "unknown scenario `{}` (expected one of {})",
                self.scenario,
                SCENARIOS.join(", ")
            )));
        }
        self.autoencoder.validate()?;
        let d = &self.dataset;
        if !(0.0..=1.0).contains(&d.train_fraction) {
            return Err(Error::invalid("dataset.train_fraction must lie in [0, 1]"));
        }
        if d.kind == DatasetKind::Mnist && (d.images.is_empty() || d.labels.is_empty()) {
            return Err(Error::invalid("dataset.images and dataset.labels are required for mnist"));
        }
        if d.kind != DatasetKind::Mnist && d.samples == 0 {
            return Err(Error::invalid("dataset.samples must be positive"));
        }
        let s = &self.schedule;
        if s.min_devices == 0 || s.min_devices > s.max_devices || s.max_channels == 0 {
            return Err(Error::invalid("schedule generator bounds are inconsistent"));
        }
        if self.classifier.hidden == 0 {
            return Err(Error::invalid("classifier.hidden must be positive"));
        }
        self.classifier.sgd.validate()?;
        let g = &self.gradcheck;
        if !(1e-7..=1e-3).contains(&g.eps) {
            return Err(Error::invalid("gradcheck.eps must lie in [1e-7, 1e-3]"));
        }
        if g.max_devices == 0 || g.max_latent == 0 {
            return Err(Error::invalid("gradcheck size bounds must be positive"));
        }
        if !(self.topology.radio_range > 0.0) || self.topology.rounds == 0 {
            return Err(Error::invalid("topology.radio_range and topology.rounds must be positive"));
        }
        Ok(())
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::{Error, Result};

/// Run record. Its `[config]` table is a complete config and can be passed back via
/// `--config` to reproduce the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub notes: Vec<String>,
    /// Files written by the run, relative to the output directory.
    pub outputs: Vec<String>,
    pub config: ExperimentConfig,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            tool: "dcslab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario: config.scenario.clone(),
            seed: config.seed,
            notes: Vec::new(),
            outputs: Vec::new(),
            config: config.clone(),
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::format("manifest", e.to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        toml::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::format("manifest", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_feeds_back_as_config() {
        let mut c = ExperimentConfig::for_scenario("sensitivity");
        c.seed = 31;
        c.sensitivity.latent_dims = vec![2, 3];
        let mut m = Manifest::new(&c);
        m.notes.push("note".into());
        m.outputs.push("metrics.csv".into());
        let text = m.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("manifest.toml");
        m.write(&p).unwrap();
        assert_eq!(Manifest::read(&p).unwrap(), m);
    }
}

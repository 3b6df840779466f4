//! JSON checkpoints: config plus every weight and bias array with explicit shapes.
//! Floats are written with shortest round-trip formatting, so a reloaded model
//! reproduces forward outputs bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Autoencoder, AutoencoderConfig};
use crate::nn::{DenseLayer, Mlp};
use crate::{Error, Result, Scalar};

pub const CHECKPOINT_FORMAT: &str = "dcslab-autoencoder/1";

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct Checkpoint<T> {
    format: String,
    config: AutoencoderConfig,
    encoder: DenseLayer<T>,
    decoder: Mlp<T>,
}

impl<T: Scalar> Autoencoder<T> {
    pub fn to_checkpoint_string(&self) -> Result<String> {
        let ckpt = Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            config: self.config.clone(),
            encoder: self.encoder.clone(),
            decoder: self.decoder.clone(),
        };
        Ok(serde_json::to_string_pretty(&ckpt)?)
    }

    pub fn from_checkpoint_str(text: &str) -> Result<Self> {
        let ckpt: Checkpoint<T> = serde_json::from_str(text)?;
        if ckpt.format != CHECKPOINT_FORMAT {
            return Err(Error::format(
                "checkpoint",
                format!("unsupported format tag {:?}", ckpt.format),
            ));
        }
        Autoencoder::from_parts(ckpt.config, ckpt.encoder, ckpt.decoder)
    }

    pub fn save_checkpoint(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_checkpoint_string()?)?;
        Ok(())
    }

    pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_checkpoint_str(&fs::read_to_string(path)?)
    }
}

use serde::{Deserialize, Serialize};

use crate::nn::{ActivationKind, SgdConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoencoderConfig {
    /// Raw dimension N, one scalar per device.
    pub n_devices: usize,
    /// Latent dimension M.
    pub latent_dim: usize,
    /// Hidden widths of the decoder; empty means a single `M → N` layer.
    pub decoder_hidden_sizes: Vec<usize>,
    pub encoder_activation: ActivationKind,
    pub decoder_hidden_activation: ActivationKind,
    /// Activation of the decoder's output layer.
    pub decoder_activation: ActivationKind,
    pub huber_delta: f64,
    /// Standard deviation of the latent noise.
    pub noise_sigma: f64,
    pub sgd: SgdConfig,
    pub finetune_threshold: f64,
    /// Re-initialize instead of warm-starting when the drift monitor fires.
    pub finetune_cold_start: bool,
}

impl Default for AutoencoderConfig {
    fn default() -> Self {
        Self {
            n_devices: 64,
            latent_dim: 16,
            decoder_hidden_sizes: Vec::new(),
            encoder_activation: ActivationKind::Identity,
            decoder_hidden_activation: ActivationKind::ReLU,
            decoder_activation: ActivationKind::Sigmoid,
            huber_delta: 1.0,
            noise_sigma: 0.1,
            sgd: SgdConfig::default(),
            finetune_threshold: 1.0,
            finetune_cold_start: false,
        }
    }
}

impl AutoencoderConfig {
    pub fn new(n_devices: usize, latent_dim: usize) -> Self {
        Self {
            n_devices,
            latent_dim,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.latent_dim == 0 || self.latent_dim > self.n_devices {
            return Err(Error::invalid(format!(
                "latent_dim must satisfy 1 <= M <= N (M = {}, N = {})",
                self.latent_dim, self.n_devices
            )));
        }
        if self.decoder_hidden_sizes.contains(&0) {
            return Err(Error::invalid("decoder hidden sizes must be positive"));
        }
        if !(self.huber_delta > 0.0 && self.huber_delta.is_finite()) {
            return Err(Error::invalid("huber_delta must be positive"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma must be non-negative"));
        }
        if !(self.finetune_threshold > 0.0) {
            return Err(Error::invalid("finetune_threshold must be positive"));
        }
        self.sgd.validate()
    }

    /// Widths of the decoder layers, ending in N.
    pub fn decoder_sizes(&self) -> Vec<usize> {
        let mut sizes = self.decoder_hidden_sizes.clone();
        sizes.push(self.n_devices);
        sizes
    }

    pub fn decoder_activations(&self) -> Vec<ActivationKind> {
        let mut acts = vec![self.decoder_hidden_activation; self.decoder_hidden_sizes.len()];
        acts.push(self.decoder_activation);
        acts
    }

    pub fn encoder_param_count(&self) -> usize {
        self.latent_dim * self.n_devices + self.latent_dim
    }

    pub fn decoder_param_count(&self) -> usize {
        let mut fan_in = self.latent_dim;
        let mut total = 0;
        for out in self.decoder_sizes() {
            total += fan_in * out + out;
            fan_in = out;
        }
        total
    }
}

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{add_noise, Autoencoder};
use crate::nn::{huber_grad, huber_loss, GradientSet, SgdConfig};
use crate::{Error, Result, Scalar};

/// Per-epoch training history.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    /// Mean Huber loss over the samples seen in each epoch.
    pub epoch_losses: Vec<f64>,
    pub epoch_seconds: Vec<f64>,
    pub steps: usize,
}

impl TrainingReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.epoch_losses.last().copied()
    }

    pub fn first_loss(&self) -> Option<f64> {
        self.epoch_losses.first().copied()
    }
}

impl<T: Scalar> Autoencoder<T> {
    /// Batch-mean loss and gradients, laid out like [`Autoencoder::as_mlp`]: the encoder
    /// layer first, then the decoder layers. Noise is sampled per sample with the
    /// configured sigma and passes the gradient through unchanged.
    pub fn batch_gradients<R: Rng + ?Sized>(&self, batch: &[Vec<T>], rng: &mut R) -> Result<(GradientSet<T>, T)> {
        if batch.is_empty() {
            return Err(Error::invalid("training batch is empty"));
        }
        let delta = T::lit(self.config.huber_delta);
        let mut total = GradientSet::zeros_like(&self.as_mlp());
        let mut loss_sum = T::zero();
        for x in batch {
            if x.len() != self.config.n_devices {
                return Err(Error::dims("training sample", self.config.n_devices, x.len()));
            }
            let (enc_pre, y) = self.encoder.forward(x)?;
            let y_hat = add_noise(&y, self.config.noise_sigma, rng)?;
            let trace = self.decoder.forward_trace(&y_hat)?;
            loss_sum += huber_loss(x, &trace.output, delta)?;
            let out_grad = huber_grad(x, &trace.output, delta)?;
            let (dec_grads, latent_grad) = self.decoder.backward(&trace, &out_grad)?;
            let (enc_grad, _) = self.encoder.backward(x, &enc_pre, &latent_grad)?;
            let mut layers = Vec::with_capacity(1 + dec_grads.layers().len());
            layers.push(enc_grad);
            layers.extend(dec_grads.into_layers());
            total.add_assign(&GradientSet::new(layers))?;
        }
        let inv = T::one() / T::lit(batch.len() as f64);
        total.scale(inv);
        Ok((total, loss_sum * inv))
    }

    /// One SGD update on the mean Huber loss of `batch`, using the configured learning rate.
    /// Returns the updated model and the batch's mean loss before the update.
    pub fn train_step<R: Rng + ?Sized>(&self, batch: &[Vec<T>], rng: &mut R) -> Result<(Self, T)> {
        self.step_with_rate(batch, self.config.sgd.learning_rate, rng)
    }

    fn step_with_rate<R: Rng + ?Sized>(&self, batch: &[Vec<T>], learning_rate: f64, rng: &mut R) -> Result<(Self, T)> {
        let (grads, loss) = self.batch_gradients(batch, rng)?;
        let mut next = self.clone();
        next.apply(&grads, T::lit(learning_rate));
        Ok((next, loss))
    }

    fn apply(&mut self, grads: &GradientSet<T>, lr: T) {
        let (enc, dec) = grads.layers().split_first().expect("encoder gradient present");
        crate::nn::gradients_apply_layer(&mut self.encoder, enc, lr);
        for (layer, g) in self.decoder.layers_mut().iter_mut().zip(dec) {
            crate::nn::gradients_apply_layer(layer, g, lr);
        }
    }

    /// Mini-batch SGD over `dataset` for `cfg.epochs` epochs, reshuffling every epoch.
    pub fn train<R: Rng + ?Sized>(&self, dataset: &[Vec<T>], cfg: &SgdConfig, rng: &mut R) -> Result<(Self, TrainingReport)> {
        if dataset.is_empty() {
            return Err(Error::invalid("training dataset is empty"));
        }
        cfg.validate()?;
        let mut model = self.clone();
        let mut report = TrainingReport::default();
        let mut order: Vec<usize> = (0..dataset.len()).collect();
        let mut batch = Vec::with_capacity(cfg.batch_size);
        for _ in 0..cfg.epochs {
            let start = Instant::now();
            order.shuffle(rng);
            let mut weighted = 0.0;
            for chunk in order.chunks(cfg.batch_size) {
                batch.clear();
                batch.extend(chunk.iter().map(|&i| dataset[i].clone()));
                let (next, loss) = model.step_with_rate(&batch, cfg.learning_rate, rng)?;
                model = next;
                weighted += loss.to_f64_lossy() * chunk.len() as f64;
                report.steps += 1;
            }
            report.epoch_losses.push(weighted / dataset.len() as f64);
            report.epoch_seconds.push(start.elapsed().as_secs_f64());
        }
        Ok((model, report))
    }

    /// Mean noise-free Huber reconstruction error over `data`.
    pub fn reconstruction_error(&self, data: &[Vec<T>]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::invalid("evaluation data is empty"));
        }
        let delta = T::lit(self.config.huber_delta);
        let mut sum = 0.0;
        for x in data {
            sum += huber_loss(x, &self.reconstruct(x)?, delta)?.to_f64_lossy();
        }
        Ok(sum / data.len() as f64)
    }

    /// Mean absolute per-entry reconstruction error, noise-free.
    pub fn mean_abs_error(&self, data: &[Vec<T>]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::invalid("evaluation data is empty"));
        }
        let mut sum = 0.0;
        let mut count = 0usize;
        for x in data {
            let xr = self.reconstruct(x)?;
            sum += x.iter().zip(&xr).map(|(&a, &b)| (a - b).abs().to_f64_lossy()).sum::<f64>();
            count += x.len();
        }
        Ok(sum / count as f64)
    }

    /// Evaluates the noise-free error on `recent_data`; if it exceeds `threshold`, retrains
    /// on that data (warm start unless `finetune_cold_start`) and returns `true`.
    pub fn monitor_and_finetune<R: Rng + ?Sized>(
        &self,
        recent_data: &[Vec<T>],
        threshold: f64,
        cfg: &SgdConfig,
        rng: &mut R,
    ) -> Result<(Self, bool)> {
        let error = self.reconstruction_error(recent_data)?;
        if !(error > threshold) {
            return Ok((self.clone(), false));
        }
        let start = if self.config.finetune_cold_start {
            Autoencoder::new(self.config.clone(), rng)?
        } else {
            self.clone()
        };
        let (model, _) = start.train(recent_data, cfg, rng)?;
        Ok((model, true))
    }
}

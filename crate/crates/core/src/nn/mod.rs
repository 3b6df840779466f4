//! Minimal dense network kernel.
//!
//! Everything here is plain data plus pure functions: forward passes return fresh vectors,
//! [`sgd_step`] returns an updated [`Mlp`], and the only randomness comes in through explicit
//! `Rng` arguments.

mod activation;
mod gradcheck;
mod gradients;
mod layer;
mod loss;
mod matrix;
mod mlp;

pub use activation::ActivationKind;
pub use gradcheck::finite_diff_grad;
pub use gradients::{sgd_step, GradientSet, LayerGrad};
pub(crate) use gradients::apply_layer as gradients_apply_layer;
pub use layer::{dense_forward, DenseLayer};
pub use loss::{huber_grad, huber_loss};
pub use matrix::Matrix2;
pub use mlp::{mlp_backward, ForwardTrace, Mlp};

use serde::{Deserialize, Serialize};

/// Plain mini-batch SGD settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            batch_size: 32,
            epochs: 10,
            seed: 0,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(crate::Error::invalid(format!(
                "learning_rate must be a finite non-negative number, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(crate::Error::invalid("batch_size must be at least 1"));
        }
        Ok(())
    }
}

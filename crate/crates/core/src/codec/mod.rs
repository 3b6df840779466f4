//! Asymmetric autoencoder: one dense encoder layer at the aggregator, a deeper decoder at
//! the edge server, Gaussian noise on the latent vector during training.

mod autoencoder;
mod checkpoint;
mod config;
mod train;

pub use autoencoder::{add_noise, Autoencoder};
pub use checkpoint::CHECKPOINT_FORMAT;
pub use config::AutoencoderConfig;
pub use train::TrainingReport;

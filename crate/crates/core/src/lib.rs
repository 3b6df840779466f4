//! A desk-scale laboratory for edge-orchestrated deep compressed sensing.
//!
//! The crate is split into six modules:
//!
//! * [`nn`]: dense layers, manual backpropagation, vector-level Huber loss, SGD and a
//!   finite-difference gradient oracle.
//! * [`codec`]: the asymmetric autoencoder (one dense encoder layer, deeper decoder) with
//!   latent Gaussian noise, training loop, drift monitor and checkpoints.
//! * [`wsn`]: cluster aggregation trees, raw and compressed in-network aggregation and the
//!   per-link transmission ledger.
//! * [`sched`]: device selection and upload scheduling with the primal-dual grouping /
//!   gathering / scheduling / selection pipeline, two baselines and a brute-force oracle.
//! * [`data`]: synthetic sensor signals, the IDX image format and dataset splitting.
//! * [`harness`]: configuration-driven scenarios that emit CSV metrics and run manifests.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases below fix the
//! scalar to `f64`, which is what the harness and the tolerance-sensitive checks use.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.

pub mod codec;
pub mod data;
pub mod error;
pub mod harness;
pub mod nn;
mod scalar;
pub mod sched;
pub mod wsn;
mod textio;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = nn::Matrix2<f64>;
pub type Layer = nn::DenseLayer<f64>;
pub type Network = nn::Mlp<f64>;
pub type Gradients = nn::GradientSet<f64>;
pub type Codec = codec::Autoencoder<f64>;
pub type CodecF32 = codec::Autoencoder<f32>;
pub type Device = sched::DeviceProfile<f64>;
pub type Instance = sched::TrainInstance<f64>;
pub type Solution = sched::ScheduleSolution<f64>;
pub type Samples = data::Dataset<f64>;

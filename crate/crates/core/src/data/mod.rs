//! Datasets: synthetic sensor signals, IDX image files and train/test splitting.

mod dataset;
mod idx;
mod synth;

pub use dataset::Dataset;
pub use idx::{idx_load, idx_load_images, read_idx_images, read_idx_labels, IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC};
pub use synth::{synth_field, synth_sparse};

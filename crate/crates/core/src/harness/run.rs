use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::classifier::blobs;
use super::config::{DatasetKind, DatasetSpec, ExperimentConfig};
use super::manifest::Manifest;
use super::metrics::{emit_metrics, format_real, MetricsRecord};
use super::{scenarios, schedule_runs};
use crate::data::{idx_load, synth_field, synth_sparse, Dataset};
use crate::Error;

/// Failure of a run, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Bad configuration or unreadable input.
    #[error("{0}")]
    Validation(#[from] Error),
    /// A checked property did not hold.
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 1,
            HarnessError::Assertion(_) => 2,
        }
    }
}

pub(crate) type HResult<T> = std::result::Result<T, HarnessError>;

pub(crate) fn check(ok: bool, message: impl FnOnce() -> String) -> HResult<()> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::Assertion(message()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub records: Vec<MetricsRecord>,
    /// Human-readable result lines.
    pub summary: Vec<String>,
    pub manifest: Manifest,
}

/// What a scenario hands back to [`run_scenario`].
#[derive(Default)]
pub(crate) struct ScenarioOutput {
    pub records: Vec<MetricsRecord>,
    pub timings: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub files: Vec<String>,
    pub summary: Vec<String>,
}

/// Independent random streams derived from one seed.
pub(crate) mod stream {
    pub const DATA: u64 = 1;
    pub const INIT: u64 = 2;
    pub const TRAIN: u64 = 3;
    pub const EVAL: u64 = 4;
    pub const SCHEDULE: u64 = 5;
    pub const TOPOLOGY: u64 = 6;
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Builds the configured dataset. `dim` must match when `expect_dim` is given.
pub(crate) fn load_dataset(spec: &DatasetSpec, seed: u64, expect_dim: Option<usize>) -> HResult<Dataset<f64>> {
    let mut rng = rng_for(seed, stream::DATA);
    let data = match spec.kind {
        DatasetKind::Sparse => synth_sparse(spec.samples, spec.dim, spec.sparsity, &mut rng)?,
        DatasetKind::Field => synth_field(spec.samples, spec.dim, spec.correlation_length, &mut rng)?,
        DatasetKind::Blobs => blobs(spec.samples, spec.dim, spec.classes, spec.spread, &mut rng)?,
        DatasetKind::Mnist => idx_load(&spec.images, &spec.labels, spec.limit)?,
    };
    if let Some(n) = expect_dim {
        if data.dim() != n {
            return Err(Error::invalid(format!(
                "dataset samples have length {} but autoencoder.n_devices is {n}",
                data.dim()
            ))
            .into());
        }
    }
    if data.is_empty() {
        return Err(Error::invalid("dataset is empty").into());
    }
    Ok(data.with_seed(seed))
}

fn write_timing(path: &Path, timings: &[(String, f64)]) -> crate::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["label", "seconds"])?;
    for (label, secs) in timings {
        w.write_record([label.as_str(), &format_real(*secs)])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs `config.scenario`, writing `metrics.csv`, `timing.csv` and `manifest.toml`
/// into `config.out_dir`.
pub fn run_scenario(config: &ExperimentConfig) -> HResult<RunOutcome> {
    config.validate()?;
    let out_dir = PathBuf::from(&config.out_dir);
    fs::create_dir_all(&out_dir).map_err(Error::from)?;
    let start = Instant::now();
    let mut output = match config.scenario.as_str() {
        "train" => scenarios::train(config, &out_dir)?,
        "aggregate" => scenarios::aggregate(config, &out_dir)?,
        "sensitivity" => scenarios::sensitivity(config, &out_dir)?,
        "classify" => scenarios::classify(config, &out_dir)?,
        "gradcheck" => scenarios::gradcheck(config, &out_dir)?,
        "schedule" => schedule_runs::schedule(config, &out_dir)?,
        "example1" => schedule_runs::example1(config, &out_dir)?,
        other => return Err(Error::invalid(format!("unknown scenario `{other}`")).into()),
    };
    output.timings.push(("total".into(), start.elapsed().as_secs_f64()));
    if !config.record_wall_time {
        for r in &mut output.records {
            r.wall_seconds = None;
        }
    }

    emit_metrics(out_dir.join("metrics.csv"), &output.records, true)?;
    write_timing(&out_dir.join("timing.csv"), &output.timings)?;
    let mut manifest = Manifest::new(config);
    manifest.notes = output.notes;
    manifest.outputs = ["metrics.csv", "timing.csv"]
        .into_iter()
        .map(String::from)
        .chain(output.files)
        .collect();
    manifest.write(out_dir.join("manifest.toml"))?;
    Ok(RunOutcome {
        out_dir,
        records: output.records,
        summary: output.summary,
        manifest,
    })
}

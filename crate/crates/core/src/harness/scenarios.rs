use std::fs::File;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use super::classifier::train_classifier;
use super::config::{ExperimentConfig, TopologyKind};
use super::metrics::{emit_metrics, MetricsRecord};
use super::run::{check, load_dataset, rng_for, stream, HResult, ScenarioOutput};
use crate::codec::{Autoencoder, AutoencoderConfig, TrainingReport};
use crate::data::Dataset;
use crate::nn::{finite_diff_grad, ActivationKind};
use crate::wsn::{
    aggregate_compressed, aggregate_raw, build_tree, chain_positions, distribute_encoder, random_deployment,
    record_edge_upload, star_positions, ClusterTopology, Direction, Payload, TransmissionLedger,
};
use crate::Error;

/// Latent size of the comparison stand-in.
pub const DCSNET_LIKE_LATENT: usize = 1024;
/// Hidden decoder widths of the stand-in (four dense decoder layers in total).
pub const DCSNET_LIKE_DECODER: [usize; 3] = [256, 256, 256];

/// The `dcsnet-like` comparison configuration for `base.n_devices` inputs. The latent
/// is clamped to N because the encoder must compress.
pub fn dcsnet_like_config(base: &AutoencoderConfig) -> AutoencoderConfig {
    AutoencoderConfig {
        latent_dim: DCSNET_LIKE_LATENT.min(base.n_devices),
        decoder_hidden_sizes: DCSNET_LIKE_DECODER.to_vec(),
        ..base.clone()
    }
}

fn epoch_records(scenario: &str, variant: &str, report: &TrainingReport, steps_per_epoch: usize) -> Vec<MetricsRecord> {
    report
        .epoch_losses
        .iter()
        .enumerate()
        .map(|(e, &loss)| MetricsRecord {
            epoch: Some(e as u64 + 1),
            step: Some(((e + 1) * steps_per_epoch) as u64),
            loss: Some(loss),
            wall_seconds: Some(report.epoch_seconds[..=e].iter().sum()),
            ..MetricsRecord::new(scenario, variant)
        })
        .collect()
}

struct Trained {
    model: Autoencoder<f64>,
    report: TrainingReport,
    eval_loss: f64,
    eval_mae: f64,
}

/// Trains on `train` and evaluates on `test` (or on `train` when `test` is empty).
fn fit(config: &AutoencoderConfig, train: &Dataset<f64>, test: &Dataset<f64>, seed: u64) -> HResult<Trained> {
    let model = Autoencoder::new(config.clone(), &mut rng_for(seed, stream::INIT))?;
    let mut rng = rng_for(seed.wrapping_add(config.sgd.seed), stream::TRAIN);
    let (model, report) = model.train(train.samples(), &config.sgd, &mut rng)?;
    let eval = if test.is_empty() { train } else { test };
    Ok(Trained {
        eval_loss: model.reconstruction_error(eval.samples())?,
        eval_mae: model.mean_abs_error(eval.samples())?,
        model,
        report,
    })
}

fn trained_records(scenario: &str, variant: &str, t: &Trained, train_len: usize, batch: usize) -> Vec<MetricsRecord> {
    let mut records = epoch_records(scenario, variant, &t.report, train_len.div_ceil(batch));
    records.push(MetricsRecord {
        step: Some(t.report.steps as u64),
        loss: Some(t.eval_loss),
        mae: Some(t.eval_mae),
        ..MetricsRecord::new(scenario, format!("{variant}-eval"))
    });
    records
}

pub(crate) fn train(config: &ExperimentConfig, out: &Path) -> HResult<ScenarioOutput> {
    let ae_cfg = &config.autoencoder;
    let data = load_dataset(&config.dataset, config.seed, Some(ae_cfg.n_devices))?;
    let (train, test) = data.split(config.dataset.train_fraction, &mut rng_for(config.seed, stream::EVAL))?;
    let mut o = ScenarioOutput::default();
    let t = fit(ae_cfg, &train, &test, config.seed)?;
    o
        .records
        .extend(trained_records("train", "autoencoder", &t, train.len(), ae_cfg.sgd.batch_size));
    o.timings.extend(t.report.epoch_seconds.iter().enumerate().map(|(e, &s)| (format!("autoencoder/epoch{}", e + 1), s)));
    o.summary.push(format!(
        "autoencoder: first epoch loss {:.6}, last epoch loss {:.6}, eval mae {:.6}",
        t.report.first_loss().unwrap_or(f64::NAN),
        t.report.final_loss().unwrap_or(f64::NAN),
        t.eval_mae
    ));
    t.model.save_checkpoint(out.join("autoencoder.json"))?;
    o.files.push("autoencoder.json".into());

    if config.compare_dcsnet_like {
        let cfg = dcsnet_like_config(ae_cfg);
        let half = train.split(0.5, &mut rng_for(config.seed, stream::EVAL))?.0;
        let s = fit(&cfg, &half, &test, config.seed)?;
        o
            .records
            .extend(trained_records("train", "dcsnet-like", &s, half.len(), cfg.sgd.batch_size));
        o.timings.extend(s.report.epoch_seconds.iter().enumerate().map(|(e, &x)| (format!("dcsnet-like/epoch{}", e + 1), x)));
        o.summary.push(format!("dcsnet-like: eval mae {:.6}", s.eval_mae));
        o.notes.push(format!(
            "dcsnet-like is a declared stand-in (latent {}, decoder hidden {:?}, 50% of the training split), not the original architecture",
            cfg.latent_dim, DCSNET_LIKE_DECODER
        ));
    }
    Ok(o)
}

fn build_topology(config: &ExperimentConfig) -> HResult<ClusterTopology> {
    let t = &config.topology;
    let n = config.autoencoder.n_devices;
    Ok(match t.kind {
        TopologyKind::Random => {
            random_deployment(n, t.side, t.radio_range, t.max_attempts, &mut rng_for(config.seed, stream::TOPOLOGY))?
        }
        TopologyKind::Chain => build_tree(&chain_positions(n, t.spacing), t.radio_range, 0)?,
        TopologyKind::Star => build_tree(&star_positions(n, t.spacing), t.radio_range, 0)?,
    })
}

fn ledger_record(variant: &str, ledger: &TransmissionLedger) -> MetricsRecord {
    MetricsRecord {
        uplink: Some(ledger.total(Direction::Uplink)),
        downlink: Some(ledger.total(Direction::Downlink)),
        edge: Some(ledger.total(Direction::ClusterToEdge)),
        ..MetricsRecord::new("aggregate", variant)
    }
}

pub(crate) fn aggregate(config: &ExperimentConfig, out: &Path) -> HResult<ScenarioOutput> {
    let ae_cfg = &config.autoencoder;
    let (n, m) = (ae_cfg.n_devices, ae_cfg.latent_dim);
    let topo = build_topology(config)?;
    let ae: Autoencoder<f64> = Autoencoder::new(ae_cfg.clone(), &mut rng_for(config.seed, stream::INIT))?;
    let mut spec = config.dataset.clone();
    spec.samples = config.topology.probe_samples.max(1);
    let probes = load_dataset(&spec, config.seed, Some(n))?;
    let rounds = config.topology.rounds;

    let (shards, mut compressed) = distribute_encoder(&ae, &topo)?;
    let mut raw = TransmissionLedger::new();
    let mut max_diff = 0.0f64;
    for r in 0..rounds {
        let x = &probes.samples()[(r as usize) % probes.len()];
        let (assembled, ledger) = aggregate_raw(&topo, x)?;
        raw.merge(&ledger);
        check(&assembled == x, || "raw aggregation reordered readings".into())?;
        let (y, ledger) = aggregate_compressed(&topo, &shards, ae.encoder().bias(), ae_cfg.encoder_activation, x)?;
        compressed.merge(&ledger);
        let direct = ae.encode(x)?;
        max_diff = y.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(max_diff, f64::max);
    }
    record_edge_upload(&mut raw, &topo, Payload::Raw, m, rounds);
    record_edge_upload(&mut compressed, &topo, Payload::Compressed, m, rounds);
    check(max_diff < 1e-5, || format!("in-network encoding differs from the encoder by {max_diff:e}"))?;

    for (name, ledger) in [("ledger-raw.csv", &raw), ("ledger-compressed.csv", &compressed)] {
        ledger.write_csv(File::create(out.join(name)).map_err(Error::from)?)?;
    }
    topo.write_to(File::create(out.join("topology.csv")).map_err(Error::from)?)?;

    let edge_ratio = raw.total(Direction::ClusterToEdge) as f64 / compressed.total(Direction::ClusterToEdge) as f64;
    let mut o = ScenarioOutput::default();
    o.records.push(ledger_record("raw", &raw));
    o.records.push(ledger_record("compressed", &compressed));
    o.records.push(MetricsRecord {
        ratio: Some(edge_ratio),
        ..MetricsRecord::new("aggregate", "edge-ratio")
    });
    o.records.push(MetricsRecord {
        ratio: Some(DCSNET_LIKE_LATENT as f64 / m as f64),
        ..MetricsRecord::new("aggregate", "latent-ratio-dcsnet-like")
    });
    o.records.push(MetricsRecord {
        value: Some(max_diff),
        ..MetricsRecord::new("aggregate", "encode-max-abs-diff")
    });
    o.files.extend(["ledger-raw.csv", "ledger-compressed.csv", "topology.csv"].map(String::from));
    o.summary.push(format!(
        "raw: uplink {} edge {}; compressed: uplink {} downlink {} edge {}; edge ratio {edge_ratio}; max |Δ| {max_diff:e}",
        raw.total(Direction::Uplink),
        raw.total(Direction::ClusterToEdge),
        compressed.total(Direction::Uplink),
        compressed.total(Direction::Downlink),
        compressed.total(Direction::ClusterToEdge),
    ));
    Ok(o)
}

/// One-at-a-time sweep points around the base configuration.
fn sensitivity_points(config: &ExperimentConfig) -> Vec<(String, f64, AutoencoderConfig)> {
    let base = &config.autoencoder;
    let s = &config.sensitivity;
    let mut points = Vec::new();
    for &m in &s.latent_dims {
        points.push(("latent_dim".to_string(), m as f64, AutoencoderConfig { latent_dim: m, ..base.clone() }));
    }
    for &sigma in &s.noise_sigmas {
        points.push(("noise_sigma".to_string(), sigma, AutoencoderConfig { noise_sigma: sigma, ..base.clone() }));
    }
    for &depth in &s.decoder_depths {
        points.push((
            "decoder_depth".to_string(),
            depth as f64,
            AutoencoderConfig {
                decoder_hidden_sizes: vec![s.hidden_width; depth],
                ..base.clone()
            },
        ));
    }
    points
}

pub(crate) fn sensitivity(config: &ExperimentConfig, out: &Path) -> HResult<ScenarioOutput> {
    let points = sensitivity_points(config);
    for (_, _, cfg) in &points {
        cfg.validate()?;
    }
    let data = load_dataset(&config.dataset, config.seed, Some(config.autoencoder.n_devices))?;
    let (train, test) = data.split(config.dataset.train_fraction, &mut rng_for(config.seed, stream::EVAL))?;
    let results: Vec<HResult<(String, Trained)>> = points
        .par_iter()
        .enumerate()
        .map(|(i, (param, value, cfg))| {
            let seed = config.seed.wrapping_add(i as u64);
            let t = fit(cfg, &train, &test, seed)?;
            let file = format!("sensitivity-{i:02}-{param}-{value}.csv");
            let variant = format!("{param}={value}");
            let mut records = trained_records("sensitivity", &variant, &t, train.len(), cfg.sgd.batch_size);
            if !config.record_wall_time {
                records.iter_mut().for_each(|r| r.wall_seconds = None);
            }
            emit_metrics(out.join(&file), &records, true)?;
            Ok((file, t))
        })
        .collect();

    let mut o = ScenarioOutput::default();
    for ((param, value, _), result) in points.iter().zip(results) {
        let (file, t) = result?;
        o.records.push(MetricsRecord {
            step: Some(t.report.steps as u64),
            loss: Some(t.eval_loss),
            mae: Some(t.eval_mae),
            value: Some(*value),
            ..MetricsRecord::new("sensitivity", param.clone())
        });
        o.timings.push((file.clone(), t.report.epoch_seconds.iter().sum()));
        o.summary.push(format!("{param} = {value}: eval loss {:.6}, mae {:.6}", t.eval_loss, t.eval_mae));
        o.files.push(file);
    }
    Ok(o)
}

pub(crate) fn classify(config: &ExperimentConfig, _out: &Path) -> HResult<ScenarioOutput> {
    let ae_cfg = &config.autoencoder;
    let data = load_dataset(&config.dataset, config.seed, Some(ae_cfg.n_devices))?;
    if data.labels().is_none() {
        return Err(Error::invalid("classify needs a labelled dataset (blobs or mnist)").into());
    }
    let (train, test) = data.split(config.dataset.train_fraction, &mut rng_for(config.seed, stream::EVAL))?;
    let c = &config.classifier;
    let raw_acc = train_classifier(&train, &test, c.hidden, &c.sgd, &mut rng_for(config.seed, stream::TRAIN))?;

    let t = fit(ae_cfg, &train, &test, config.seed)?;
    let mut noise_rng = rng_for(config.seed, stream::EVAL);
    let recon: Vec<Vec<f64>> = train
        .samples()
        .iter()
        .map(|x| t.model.reconstruct_noisy(x, ae_cfg.noise_sigma, &mut noise_rng))
        .collect::<crate::Result<_>>()?;
    let recon: Vec<Vec<f64>> = recon.into_iter().map(|x| x.into_iter().map(|v| v.clamp(0.0, 1.0)).collect()).collect();
    let recon = Dataset::new(recon, train.labels().map(<[usize]>::to_vec), "reconstructed")?;
    let rec_acc = train_classifier(&recon, &test, c.hidden, &c.sgd, &mut rng_for(config.seed, stream::TRAIN))?;

    let mut o = ScenarioOutput::default();
    o.records.push(MetricsRecord {
        accuracy: Some(raw_acc),
        ..MetricsRecord::new("classify", "raw")
    });
    o.records.push(MetricsRecord {
        accuracy: Some(rec_acc),
        mae: Some(t.eval_mae),
        value: Some(ae_cfg.noise_sigma),
        ..MetricsRecord::new("classify", "reconstructed")
    });
    o.notes.push(
        "classifier is a two-layer dense network (ReLU hidden layer, softmax output), substituted for a two-layer convolutional network".into(),
    );
    o.notes.push("reconstructed: classifier trained on noisy-latent reconstructions of the training split, tested on raw test data".into());
    o.summary.push(format!("accuracy raw {raw_acc:.4}, reconstructed {rec_acc:.4}"));
    Ok(o)
}

/// Random smooth autoencoder used by the gradient check.
fn gradcheck_case<R: Rng>(config: &ExperimentConfig, rng: &mut R) -> AutoencoderConfig {
    let g = &config.gradcheck;
    let n = rng.random_range(1..=g.max_devices);
    let m = rng.random_range(1..=g.max_latent.min(n));
    let layers = rng.random_range(1..=g.max_decoder_layers.max(1));
    let smooth = [ActivationKind::Identity, ActivationKind::Tanh, ActivationKind::Sigmoid];
    AutoencoderConfig {
        n_devices: n,
        latent_dim: m,
        decoder_hidden_sizes: (1..layers).map(|_| rng.random_range(1..=16)).collect(),
        encoder_activation: smooth[rng.random_range(0..3)],
        decoder_hidden_activation: smooth[rng.random_range(1..3)],
        decoder_activation: smooth[rng.random_range(0..3)],
        huber_delta: rng.random_range(0.1..5.0),
        noise_sigma: 0.0,
        ..AutoencoderConfig::default()
    }
}

pub(crate) fn gradcheck(config: &ExperimentConfig, _out: &Path) -> HResult<ScenarioOutput> {
    let g = &config.gradcheck;
    let mut rng = rng_for(config.seed, stream::INIT);
    let mut o = ScenarioOutput::default();
    let mut worst = 0.0f64;
    for case in 0..g.cases {
        let cfg = gradcheck_case(config, &mut rng);
        let ae: Autoencoder<f64> = Autoencoder::new(cfg.clone(), &mut rng)?;
        let x: Vec<f64> = (0..cfg.n_devices).map(|_| rng.random_range(0.0..1.0)).collect();
        let (analytic, _) = ae.batch_gradients(std::slice::from_ref(&x), &mut rng)?;
        let numeric = finite_diff_grad(&ae.as_mlp(), &x, &x, cfg.huber_delta, g.eps)?;
        let err = analytic.max_relative_error(&numeric)?;
        worst = worst.max(err);
        o.records.push(MetricsRecord {
            step: Some(case as u64),
            value: Some(err),
            ..MetricsRecord::new("gradcheck", format!("n{}-m{}-layers{}", cfg.n_devices, cfg.latent_dim, cfg.decoder_hidden_sizes.len() + 1))
        });
    }
    o.records.push(MetricsRecord {
        value: Some(worst),
        ..MetricsRecord::new("gradcheck", "max")
    });
    o.summary.push(format!("max relative error {worst:e} over {} cases", g.cases));
    check(worst < g.tolerance, || format!("max relative error {worst:e} is not below {:e}", g.tolerance))?;
    Ok(o)
}

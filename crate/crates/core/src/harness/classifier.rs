use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::nn::{sgd_step, ActivationKind, GradientSet, Mlp, SgdConfig};
use crate::{Error, Result};

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
        .0
}

/// Dense classifier `input → hidden (ReLU) → classes`, trained with softmax
/// cross-entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    net: Mlp<f64>,
}

impl Classifier {
    pub fn fit<R: Rng + ?Sized>(train: &Dataset<f64>, classes: usize, hidden: usize, sgd: &SgdConfig, rng: &mut R) -> Result<Self> {
        sgd.validate()?;
        let labels = train
            .labels()
            .ok_or_else(|| Error::invalid("classifier training data has no labels"))?;
        if train.is_empty() {
            return Err(Error::invalid("classifier training data is empty"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::invalid(format!("label {bad} outside {classes} classes")));
        }
        let mut net = Mlp::init(
            train.dim(),
            &[hidden, classes],
            &[ActivationKind::ReLU, ActivationKind::Identity],
            rng,
        )?;
        let mut order: Vec<usize> = (0..train.len()).collect();
        for _ in 0..sgd.epochs {
            order.shuffle(rng);
            for chunk in order.chunks(sgd.batch_size) {
                let mut total = GradientSet::zeros_like(&net);
                for &i in chunk {
                    let trace = net.forward_trace(&train.samples()[i])?;
                    let mut grad = softmax(&trace.output);
                    grad[labels[i]] -= 1.0;
                    total.add_assign(&net.backward(&trace, &grad)?.0)?;
                }
                total.scale(1.0 / chunk.len() as f64);
                net = sgd_step(&net, &total, sgd.learning_rate)?;
            }
        }
        Ok(Self { net })
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.net.forward(x)?))
    }

    pub fn accuracy(&self, data: &Dataset<f64>) -> Result<f64> {
        let labels = data
            .labels()
            .ok_or_else(|| Error::invalid("evaluation data has no labels"))?;
        if data.is_empty() {
            return Err(Error::invalid("evaluation data is empty"));
        }
        let mut hits = 0usize;
        for (x, &l) in data.samples().iter().zip(labels) {
            hits += usize::from(self.predict(x)? == l);
        }
        Ok(hits as f64 / data.len() as f64)
    }
}

/// Trains a two-layer dense classifier on `train` and returns its accuracy on `test`.
pub fn train_classifier<R: Rng + ?Sized>(
    train: &Dataset<f64>,
    test: &Dataset<f64>,
    hidden: usize,
    sgd: &SgdConfig,
    rng: &mut R,
) -> Result<f64> {
    let max_label = |d: &Dataset<f64>| -> Result<usize> {
        d.labels()
            .ok_or_else(|| Error::invalid("classifier data has no labels"))
            .map(|l| l.iter().copied().max().unwrap_or(0))
    };
    let classes = max_label(train)?.max(max_label(test)?) + 1;
    if classes < 2 {
        return Err(Error::invalid("at least two classes are required"));
    }
    Classifier::fit(train, classes, hidden, sgd, rng)?.accuracy(test)
}

/// Gaussian blobs with class `j` centred at `0.25 + 0.5·j/(classes−1)` on every axis,
/// clamped to `[0, 1]`. Labels cycle through the classes.
pub fn blobs<R: Rng + ?Sized>(samples: usize, dim: usize, classes: usize, spread: f64, rng: &mut R) -> Result<Dataset<f64>> {
    if classes < 2 || dim == 0 {
        return Err(Error::invalid("blobs need at least two classes and one dimension"));
    }
    let noise = Normal::new(0.0, spread).map_err(|e| Error::invalid(e.to_string()))?;
    let mut xs = Vec::with_capacity(samples);
    let mut labels = Vec::with_capacity(samples);
    for i in 0..samples {
        let j = i % classes;
        let centre = 0.25 + 0.5 * j as f64 / (classes - 1) as f64;
        xs.push((0..dim).map(|_| (centre + noise.sample(rng)).clamp(0.0, 1.0)).collect());
        labels.push(j);
    }
    Dataset::new(xs, Some(labels), format!("blobs-d{dim}-c{classes}"))
}

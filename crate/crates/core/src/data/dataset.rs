use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Equal-length sample vectors in `[0, 1]` with optional class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Dataset<T> {
    samples: Vec<Vec<T>>,
    labels: Option<Vec<usize>>,
    pub name: String,
    /// Seed of the generator that produced the data, if any.
    pub seed: Option<u64>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(samples: Vec<Vec<T>>, labels: Option<Vec<usize>>, name: impl Into<String>) -> Result<Self> {
        if let Some(first) = samples.first() {
            let n = first.len();
            if let Some(bad) = samples.iter().find(|s| s.len() != n) {
                return Err(Error::dims("dataset sample", n, bad.len()));
            }
        }
        if samples.iter().flatten().any(|v| !(*v >= T::zero() && *v <= T::one())) {
            return Err(Error::invalid("dataset values must lie in [0, 1]"));
        }
        if let Some(l) = &labels {
            if l.len() != samples.len() {
                return Err(Error::dims("dataset labels", samples.len(), l.len()));
            }
        }
        Ok(Self {
            samples,
            labels,
            name: name.into(),
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn samples(&self) -> &[Vec<T>] {
        &self.samples
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn into_parts(self) -> (Vec<Vec<T>>, Option<Vec<usize>>) {
        (self.samples, self.labels)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample length, or 0 for an empty dataset.
    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Keeps the samples at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            labels: self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect()),
            name: self.name.clone(),
            seed: self.seed,
        }
    }

    /// Shuffles with `rng`, then puts the first `round(fraction·len)` samples in the
    /// training part.
    pub fn split<R: Rng + ?Sized>(&self, fraction: f64, rng: &mut R) -> Result<(Self, Self)> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::invalid(format!("split fraction {fraction} outside [0, 1]")));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(rng);
        let cut = (fraction * self.len() as f64).round() as usize;
        Ok((self.select(&order[..cut]), self.select(&order[cut..])))
    }
}

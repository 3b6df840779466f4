use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Dataset;
use crate::{Error, Result, Scalar};

/// Samples with exactly `k` nonzero entries at uniformly chosen positions, each drawn
/// from `U(0.5, 1)`.
pub fn synth_sparse<T: Scalar, R: Rng + ?Sized>(n_samples: usize, n: usize, k: usize, rng: &mut R) -> Result<Dataset<T>> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("sparsity {k} must lie in [1, {n}]")));
    }
    let samples = (0..n_samples)
        .map(|_| {
            let mut x = vec![T::zero(); n];
            for pos in sample(rng, n, k) {
                x[pos] = T::lit(rng.random_range(0.5..1.0));
            }
            x
        })
        .collect();
    Dataset::new(samples, None, format!("sparse-n{n}-k{k}"))
}

/// Smooth random fields over device indices.
///
/// White noise is convolved with a Gaussian kernel of standard deviation `length`
/// (truncated at three deviations), then each sample is min-max scaled to `[0, 1]`.
pub fn synth_field<T: Scalar, R: Rng + ?Sized>(n_samples: usize, n: usize, length: f64, rng: &mut R) -> Result<Dataset<T>> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::invalid("correlation length must be positive"));
    }
    let half = (3.0 * length).ceil() as usize;
    let kernel: Vec<f64> = (0..=2 * half)
        .map(|j| {
            let d = j as f64 - half as f64;
            (-d * d / (2.0 * length * length)).exp()
        })
        .collect();
    let samples = (0..n_samples)
        .map(|_| {
            let noise: Vec<f64> = (0..n + 2 * half).map(|_| StandardNormal.sample(rng)).collect();
            let smooth: Vec<f64> = (0..n)
                .map(|i| kernel.iter().zip(&noise[i..]).map(|(w, z)| w * z).sum())
                .collect();
            let lo = smooth.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = smooth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            smooth
                .iter()
                .map(|&v| if hi > lo { T::lit(((v - lo) / (hi - lo)).clamp(0.0, 1.0)) } else { T::zero() })
                .collect()
        })
        .collect();
    Dataset::new(samples, None, format!("field-n{n}-l{length}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Pearson correlation between entries `i` and `i + 1`, pooled over positions.
    fn adjacent_correlation(d: &Dataset<f64>) -> f64 {
        let pairs: Vec<(f64, f64)> = d
            .samples()
            .iter()
            .flat_map(|s| s.windows(2).map(|w| (w[0], w[1])))
            .collect();
        let n = pairs.len() as f64;
        let (ma, mb) = pairs.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0 / n, acc.1 + p.1 / n));
        let cov: f64 = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum();
        let va: f64 = pairs.iter().map(|p| (p.0 - ma).powi(2)).sum();
        let vb: f64 = pairs.iter().map(|p| (p.1 - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn sparse_counts() {
        let d: Dataset<f64> = synth_sparse(10_000, 20, 3, &mut rng(1)).unwrap();
        let total: usize = d.samples().iter().map(|s| s.iter().filter(|v| **v != 0.0).count()).sum();
        assert_eq!(total, 30_000);
        assert!(d.samples().iter().flatten().all(|&v| v == 0.0 || (0.5..1.0).contains(&v)));
        let dense: Dataset<f64> = synth_sparse(5, 8, 8, &mut rng(2)).unwrap();
        assert!(dense.samples().iter().flatten().all(|&v| v >= 0.5));
        let one: Dataset<f64> = synth_sparse(50, 8, 1, &mut rng(3)).unwrap();
        assert!(one.samples().iter().all(|s| s.iter().filter(|v| **v != 0.0).count() == 1));
    }

    #[test]
    fn sparse_errors() {
        assert!(synth_sparse::<f64, _>(1, 4, 5, &mut rng(0)).is_err());
        assert!(synth_sparse::<f64, _>(1, 4, 0, &mut rng(0)).is_err());
    }

    #[test]
    fn field_range_and_determinism() {
        let a: Dataset<f64> = synth_field(50, 32, 2.0, &mut rng(4)).unwrap();
        let b: Dataset<f64> = synth_field(50, 32, 2.0, &mut rng(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.samples().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        assert!(synth_field::<f64, _>(1, 4, 0.0, &mut rng(0)).is_err());
    }

    #[test]
    fn field_correlation_follows_length() {
        let white: Dataset<f64> = synth_field(2000, 16, 1e-3, &mut rng(5)).unwrap();
        let smooth: Dataset<f64> = synth_field(2000, 16, 3.0, &mut rng(5)).unwrap();
        // Independent entries: |r| is O(1/√pairs) ≈ 0.006; allow a wide margin.
        assert!(adjacent_correlation(&white).abs() < 0.05);
        assert!(adjacent_correlation(&smooth) > 0.8);
    }
}

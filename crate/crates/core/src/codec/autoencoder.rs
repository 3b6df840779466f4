use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::AutoencoderConfig;
use crate::nn::{DenseLayer, Mlp};
use crate::{Error, Result, Scalar};

/// Encoder `Y = σ(W_e·X + b_e)` with `W_e ∈ R^{M×N}`, and a decoder `Mlp` mapping
/// `M → … → N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder<T> {
    pub(crate) encoder: DenseLayer<T>,
    pub(crate) decoder: Mlp<T>,
    pub(crate) config: AutoencoderConfig,
}

impl<T: Scalar> Autoencoder<T> {
    pub fn new<R: Rng + ?Sized>(config: AutoencoderConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let encoder = DenseLayer::init(config.n_devices, config.latent_dim, config.encoder_activation, rng);
        let decoder = Mlp::init(
            config.latent_dim,
            &config.decoder_sizes(),
            &config.decoder_activations(),
            rng,
        )?;
        Ok(Self {
            encoder,
            decoder,
            config,
        })
    }

    /// Assembles a model from explicit parameters. Layer shapes must agree with `config`;
    /// activations are taken from the layers themselves.
    pub fn from_parts(config: AutoencoderConfig, encoder: DenseLayer<T>, decoder: Mlp<T>) -> Result<Self> {
        config.validate()?;
        let (m, n) = (config.latent_dim, config.n_devices);
        if encoder.weights().shape() != (m, n) {
            return Err(Error::invalid(format!(
                "encoder weights must be {m}x{n}, got {:?}",
                encoder.weights().shape()
            )));
        }
        if decoder.input_size() != m {
            return Err(Error::dims("decoder input", m, decoder.input_size()));
        }
        if decoder.output_size() != n {
            return Err(Error::dims("decoder output", n, decoder.output_size()));
        }
        Ok(Self {
            encoder,
            decoder,
            config,
        })
    }

    pub fn config(&self) -> &AutoencoderConfig {
        &self.config
    }

    pub fn encoder(&self) -> &DenseLayer<T> {
        &self.encoder
    }

    pub fn decoder(&self) -> &Mlp<T> {
        &self.decoder
    }

    pub fn n_devices(&self) -> usize {
        self.config.n_devices
    }

    pub fn latent_dim(&self) -> usize {
        self.config.latent_dim
    }

    pub fn encoder_param_count(&self) -> usize {
        self.encoder.param_count()
    }

    pub fn decoder_param_count(&self) -> usize {
        self.decoder.param_count()
    }

    pub fn encode(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.config.n_devices {
            return Err(Error::dims("encoder input", self.config.n_devices, x.len()));
        }
        Ok(self.encoder.forward(x)?.1)
    }

    pub fn decode(&self, y_hat: &[T]) -> Result<Vec<T>> {
        if y_hat.len() != self.config.latent_dim {
            return Err(Error::dims("decoder input", self.config.latent_dim, y_hat.len()));
        }
        self.decoder.forward(y_hat)
    }

    /// Noise-free `decode(encode(x))`.
    pub fn reconstruct(&self, x: &[T]) -> Result<Vec<T>> {
        self.decode(&self.encode(x)?)
    }

    /// `decode(encode(x) + N(0, σ²))`.
    pub fn reconstruct_noisy<R: Rng + ?Sized>(&self, x: &[T], sigma: f64, rng: &mut R) -> Result<Vec<T>> {
        self.decode(&add_noise(&self.encode(x)?, sigma, rng)?)
    }

    /// Encoder and decoder layers chained as one network (the noise-free model).
    pub fn as_mlp(&self) -> Mlp<T> {
        let mut layers = Vec::with_capacity(1 + self.decoder.layers().len());
        layers.push(self.encoder.clone());
        layers.extend_from_slice(self.decoder.layers());
        Mlp::new(layers).expect("encoder output matches decoder input")
    }
}

/// Returns `y + g` with `g_k ~ N(0, σ²)` drawn independently. `σ = 0` returns an exact
/// copy without touching the generator.
pub fn add_noise<T: Scalar, R: Rng + ?Sized>(y: &[T], sigma: f64, rng: &mut R) -> Result<Vec<T>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("noise sigma must be non-negative"));
    }
    if sigma == 0.0 {
        return Ok(y.to_vec());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(y.iter().map(|&v| v + T::lit(normal.sample(rng))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{ActivationKind, Matrix2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(n: usize, m: usize) -> AutoencoderConfig {
        AutoencoderConfig::new(n, m)
    }

    fn layer(w: Matrix2<f64>, b: Vec<f64>, a: ActivationKind) -> DenseLayer<f64> {
        DenseLayer::new(w, b, a).unwrap()
    }

    #[test]
    fn zero_sigmoid_encoder() {
        let mut c = cfg(4, 3);
        c.encoder_activation = ActivationKind::Sigmoid;
        let enc = layer(Matrix2::zeros(3, 4), vec![0.0; 3], ActivationKind::Sigmoid);
        let dec = Mlp::new(vec![layer(Matrix2::zeros(4, 3), vec![0.0; 4], ActivationKind::Sigmoid)]).unwrap();
        let ae = Autoencoder::from_parts(c, enc, dec).unwrap();
        assert_eq!(ae.encode(&[0.3, 0.1, 0.9, 0.0]).unwrap(), vec![0.5; 3]);
    }

    #[test]
    fn sum_encoder_and_affine_origin() {
        let enc = layer(Matrix2::from_rows(&[vec![1.0, 1.0]]).unwrap(), vec![0.25], ActivationKind::Identity);
        let dec = Mlp::new(vec![layer(Matrix2::zeros(2, 1), vec![0.7, 0.1], ActivationKind::Identity)]).unwrap();
        let ae = Autoencoder::from_parts(cfg(2, 1), enc, dec).unwrap();
        assert_eq!(ae.encode(&[0.5, 0.5]).unwrap(), vec![1.25]);
        assert_eq!(ae.encode(&[0.0, 0.0]).unwrap(), vec![0.25]);
        // W_d = 0 gives the constant b_d
        assert_eq!(ae.decode(&[123.0]).unwrap(), vec![0.7, 0.1]);
        assert!(ae.encode(&[1.0]).is_err());
        assert!(ae.decode(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn identity_decoder_returns_latent() {
        let enc = layer(Matrix2::identity(3), vec![0.0; 3], ActivationKind::Identity);
        let dec = Mlp::new(vec![layer(Matrix2::identity(3), vec![0.0; 3], ActivationKind::Identity)]).unwrap();
        let ae = Autoencoder::from_parts(cfg(3, 3), enc, dec).unwrap();
        assert_eq!(ae.decode(&[0.1, -2.0, 5.0]).unwrap(), vec![0.1, -2.0, 5.0]);
    }

    #[test]
    fn two_layer_decoder_matches_chained_layers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c = cfg(6, 3);
        c.decoder_hidden_sizes = vec![5];
        let ae: Autoencoder<f64> = Autoencoder::new(c, &mut rng).unwrap();
        let y = [0.3, -0.2, 0.8];
        let l = ae.decoder().layers();
        let expected = l[1].forward(&l[0].forward(&y).unwrap().1).unwrap().1;
        assert_eq!(ae.decode(&y).unwrap(), expected);
    }

    #[test]
    fn from_parts_checks_shapes() {
        let enc = layer(Matrix2::zeros(2, 3), vec![0.0; 2], ActivationKind::Identity);
        let dec = Mlp::new(vec![layer(Matrix2::zeros(3, 2), vec![0.0; 3], ActivationKind::Identity)]).unwrap();
        assert!(Autoencoder::from_parts(cfg(4, 2), enc.clone(), dec.clone()).is_err());
        assert!(Autoencoder::from_parts(cfg(3, 2), enc, dec).is_ok());
        let mut bad = cfg(3, 4);
        bad.latent_dim = 4;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn parameter_counts_follow_config() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for hidden in [vec![], vec![32], vec![32, 48]] {
            let mut c = cfg(20, 8);
            c.decoder_hidden_sizes = hidden.clone();
            let ae: Autoencoder<f64> = Autoencoder::new(c.clone(), &mut rng).unwrap();
            assert_eq!(ae.encoder_param_count(), 8 * 20 + 8);
            assert_eq!(ae.decoder_param_count(), c.decoder_param_count());
        }
        let mut c = cfg(20, 8);
        assert_eq!(c.decoder_param_count(), 8 * 20 + 20);
        c.decoder_hidden_sizes = vec![32];
        assert_eq!(c.decoder_param_count(), 8 * 32 + 32 + 32 * 20 + 20);
        c.decoder_hidden_sizes = vec![32, 48];
        assert_eq!(c.decoder_param_count(), 8 * 32 + 32 + 32 * 48 + 48 + 48 * 20 + 20);
    }

    #[test]
    fn noise_zero_sigma_is_exact_copy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = vec![0.1, 0.2, -3.0];
        let y_hat = add_noise(&y, 0.0, &mut rng).unwrap();
        assert_eq!(y_hat, y);
        assert!(add_noise(&y, -1.0, &mut rng).is_err());
    }

    #[test]
    fn noise_is_seeded() {
        let y = vec![0.0; 16];
        let a = add_noise(&y, 0.3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = add_noise(&y, 0.3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        assert_ne!(a, y);
    }

    #[test]
    fn noise_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let g = add_noise(&vec![0.0f64; n], 1.0, &mut rng).unwrap();
        let mean = g.iter().sum::<f64>() / n as f64;
        let var = g.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn f32_model_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ae: Autoencoder<f32> = Autoencoder::new(cfg(8, 2), &mut rng).unwrap();
        let x = vec![0.5f32; 8];
        let out = ae.reconstruct(&x).unwrap();
        assert_eq!(out.len(), 8);
        assert!(out.iter().all(|v| *v > 0.0 && *v < 1.0));
    }
}

use super::{huber_loss, GradientSet, LayerGrad, Matrix2, Mlp};
use crate::{Error, Result, Scalar};

/// Central-difference gradient of `huber_loss(target, model(x), delta)` with respect to
/// every weight and bias. This is an oracle for [`super::mlp_backward`]; it only uses the
/// forward pass.
pub fn finite_diff_grad<T: Scalar>(model: &Mlp<T>, x: &[T], target: &[T], delta: T, eps: T) -> Result<GradientSet<T>> {
    if !(eps >= T::lit(1e-7) && eps <= T::lit(1e-3)) {
        return Err(Error::invalid("finite-difference eps must lie in [1e-7, 1e-3]"));
    }
    if x.len() != model.input_size() {
        return Err(Error::dims("finite-difference input", model.input_size(), x.len()));
    }
    if target.len() != model.output_size() {
        return Err(Error::dims("finite-difference target", model.output_size(), target.len()));
    }
    let loss = |m: &Mlp<T>| -> Result<T> { huber_loss(target, &m.forward(x)?, delta) };
    let two_eps = eps + eps;

    let mut probe = model.clone();
    let mut layers = Vec::with_capacity(model.layers().len());
    for k in 0..model.layers().len() {
        let (rows, cols) = model.layers()[k].weights().shape();
        let mut dw = Vec::with_capacity(rows * cols);
        for idx in 0..rows * cols {
            let orig = probe.layers()[k].weights().values()[idx];
            probe.layers_mut()[k].weights_mut().values_mut()[idx] = orig + eps;
            let plus = loss(&probe)?;
            probe.layers_mut()[k].weights_mut().values_mut()[idx] = orig - eps;
            let minus = loss(&probe)?;
            probe.layers_mut()[k].weights_mut().values_mut()[idx] = orig;
            dw.push((plus - minus) / two_eps);
        }
        let mut db = Vec::with_capacity(rows);
        for idx in 0..rows {
            let orig = probe.layers()[k].bias()[idx];
            probe.layers_mut()[k].bias_mut()[idx] = orig + eps;
            let plus = loss(&probe)?;
            probe.layers_mut()[k].bias_mut()[idx] = orig - eps;
            let minus = loss(&probe)?;
            probe.layers_mut()[k].bias_mut()[idx] = orig;
            db.push((plus - minus) / two_eps);
        }
        layers.push(LayerGrad::new(Matrix2::from_vec(rows, cols, dw)?, db)?);
    }
    Ok(GradientSet::new(layers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{huber_grad, mlp_backward, ActivationKind, DenseLayer};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eps_range_enforced() {
        let l = DenseLayer::new(Matrix2::from_vec(1, 1, vec![1.0]).unwrap(), vec![0.0], ActivationKind::Identity).unwrap();
        let m = Mlp::new(vec![l]).unwrap();
        assert!(finite_diff_grad(&m, &[1.0], &[1.0], 1.0, 1e-2).is_err());
        assert!(finite_diff_grad(&m, &[1.0], &[1.0], 1.0, 1e-8).is_err());
        assert!(finite_diff_grad(&m, &[1.0], &[1.0], 1.0, 1e-5).is_ok());
    }

    #[test]
    fn dead_relu_gives_zero_gradient() {
        // pre-activation is -5 for any nearby parameters
        let l = DenseLayer::new(Matrix2::from_vec(1, 2, vec![-1.0, -1.0]).unwrap(), vec![-3.0], ActivationKind::ReLU).unwrap();
        let m = Mlp::new(vec![l]).unwrap();
        let g = finite_diff_grad(&m, &[1.0, 1.0], &[0.3], 1.0, 1e-5).unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn one_parameter_closed_form() {
        // L = ½(t − w·x)² in the quadratic branch; dL/dw = −(t − w·x)·x
        let (w, x, t) = (0.7f64, 0.9, 0.4);
        let l = DenseLayer::new(Matrix2::from_vec(1, 1, vec![w]).unwrap(), vec![0.0], ActivationKind::Identity).unwrap();
        let m = Mlp::new(vec![l]).unwrap();
        let eps = 1e-4;
        let g = finite_diff_grad(&m, &[x], &[t], 1.0, eps).unwrap();
        let analytic = -(t - w * x) * x;
        // the loss is quadratic in w, so the central difference is exact up to rounding
        assert!((g.layers()[0].weights.get(0, 0) - analytic).abs() < 1e-10);
    }

    #[test]
    fn matches_backprop_on_random_models() {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let input = rng.random_range(2..=6);
            let hidden = rng.random_range(2..=6);
            let output = rng.random_range(1..=5);
            let m: Mlp<f64> = Mlp::init(
                input,
                &[hidden, output],
                &[ActivationKind::Sigmoid, ActivationKind::Sigmoid],
                &mut rng,
            )
            .unwrap();
            let x: Vec<f64> = (0..input).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t: Vec<f64> = (0..output).map(|_| rng.random_range(0.0..1.0)).collect();
            let delta = 0.5;
            let out = m.forward(&x).unwrap();
            let analytic = mlp_backward(&m, &x, &huber_grad(&t, &out, delta).unwrap()).unwrap();
            let numeric = finite_diff_grad(&m, &x, &t, delta, 1e-5).unwrap();
            let err = analytic.max_relative_error(&numeric).unwrap();
            assert!(err < 1e-4, "seed {seed}: relative error {err}");
        }
    }
}

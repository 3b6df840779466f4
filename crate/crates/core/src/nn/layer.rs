//! Dense affine layer followed by an elementwise activation: `out = σ(W·x + b)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gradients::LayerGrad;
use super::{ActivationKind, Matrix2};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLayer<T>", into = "RawLayer<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct DenseLayer<T> {
    weights: Matrix2<T>,
    bias: Vec<T>,
    activation: ActivationKind,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct RawLayer<T> {
    activation: ActivationKind,
    weights: Matrix2<T>,
    bias: Vec<T>,
}

impl<T: Scalar> TryFrom<RawLayer<T>> for DenseLayer<T> {
    type Error = Error;

    fn try_from(raw: RawLayer<T>) -> Result<Self> {
        DenseLayer::new(raw.weights, raw.bias, raw.activation)
    }
}

impl<T> From<DenseLayer<T>> for RawLayer<T> {
    fn from(l: DenseLayer<T>) -> Self {
        RawLayer {
            activation: l.activation,
            weights: l.weights,
            bias: l.bias,
        }
    }
}

impl<T: Scalar> DenseLayer<T> {
    pub fn new(weights: Matrix2<T>, bias: Vec<T>, activation: ActivationKind) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::dims("layer bias", weights.rows(), bias.len()));
        }
        if bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("layer bias"));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    /// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero bias.
    pub fn init<R: Rng + ?Sized>(
        input: usize,
        output: usize,
        activation: ActivationKind,
        rng: &mut R,
    ) -> Self {
        let limit = (6.0 / (input + output).max(1) as f64).sqrt();
        let values = (0..input * output)
            .map(|_| T::lit(rng.random_range(-limit..=limit)))
            .collect();
        Self {
            weights: Matrix2::from_vec(output, input, values).expect("shape by construction"),
            bias: vec![T::zero(); output],
            activation,
        }
    }

    pub fn weights(&self) -> &Matrix2<T> {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut Matrix2<T> {
        &mut self.weights
    }

    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [T] {
        &mut self.bias
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    pub fn input_size(&self) -> usize {
        self.weights.cols()
    }

    pub fn output_size(&self) -> usize {
        self.weights.rows()
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// Returns `(pre_activation, output)`.
    pub fn forward(&self, input: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        if input.len() != self.input_size() {
            return Err(Error::dims("dense layer input", self.input_size(), input.len()));
        }
        let mut pre = self.weights.matvec(input)?;
        for (z, &b) in pre.iter_mut().zip(&self.bias) {
            *z += b;
        }
        let out = pre.iter().map(|&z| self.activation.apply(z)).collect();
        Ok((pre, out))
    }

    /// Backpropagates `∂L/∂out` through the layer, given the cached input and
    /// pre-activation. Returns the parameter gradients and `∂L/∂input`.
    pub fn backward(&self, input: &[T], pre: &[T], out_grad: &[T]) -> Result<(LayerGrad<T>, Vec<T>)> {
        let (rows, cols) = self.weights.shape();
        if input.len() != cols {
            return Err(Error::dims("backward input", cols, input.len()));
        }
        if pre.len() != rows {
            return Err(Error::dims("backward pre-activation", rows, pre.len()));
        }
        if out_grad.len() != rows {
            return Err(Error::dims("backward output gradient", rows, out_grad.len()));
        }
        let delta: Vec<T> = pre
            .iter()
            .zip(out_grad)
            .map(|(&z, &g)| g * self.activation.derivative(z))
            .collect();
        let mut dw = Matrix2::zeros(rows, cols);
        for (r, &d) in delta.iter().enumerate() {
            if d == T::zero() {
                continue;
            }
            for (c, &x) in input.iter().enumerate() {
                dw.set(r, c, d * x);
            }
        }
        let input_grad = self.weights.transpose_matvec(&delta)?;
        Ok((LayerGrad::new(dw, delta)?, input_grad))
    }
}

/// Free-function form of [`DenseLayer::forward`].
pub fn dense_forward<T: Scalar>(layer: &DenseLayer<T>, input: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    layer.forward(input)
}

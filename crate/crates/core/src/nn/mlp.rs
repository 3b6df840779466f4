use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ActivationKind, DenseLayer, GradientSet};
use crate::{Error, Result, Scalar};

/// A stack of dense layers where each layer's output feeds the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DenseLayer<T>>", into = "Vec<DenseLayer<T>>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Mlp<T> {
    layers: Vec<DenseLayer<T>>,
}

impl<T: Scalar> TryFrom<Vec<DenseLayer<T>>> for Mlp<T> {
    type Error = Error;

    fn try_from(layers: Vec<DenseLayer<T>>) -> Result<Self> {
        Mlp::new(layers)
    }
}

impl<T> From<Mlp<T>> for Vec<DenseLayer<T>> {
    fn from(m: Mlp<T>) -> Self {
        m.layers
    }
}

/// Cached intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace<T> {
    /// Input to each layer; `inputs[0]` is the network input.
    pub inputs: Vec<Vec<T>>,
    pub pre_activations: Vec<Vec<T>>,
    pub output: Vec<T>,
}

impl<T: Scalar> Mlp<T> {
    pub fn new(layers: Vec<DenseLayer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("an Mlp needs at least one layer"));
        }
        for pair in layers.windows(2) {
            if pair[0].output_size() != pair[1].input_size() {
                return Err(Error::dims(
                    "consecutive layer sizes",
                    pair[0].output_size(),
                    pair[1].input_size(),
                ));
            }
        }
        Ok(Self { layers })
    }

    /// Randomly initialized stack `input → sizes[0] → … → sizes[k-1]`, with
    /// `activations[i]` on layer `i`.
    pub fn init<R: Rng + ?Sized>(
        input: usize,
        sizes: &[usize],
        activations: &[ActivationKind],
        rng: &mut R,
    ) -> Result<Self> {
        if sizes.len() != activations.len() {
            return Err(Error::dims("activation list", sizes.len(), activations.len()));
        }
        let mut layers = Vec::with_capacity(sizes.len());
        let mut fan_in = input;
        for (&out, &act) in sizes.iter().zip(activations) {
            layers.push(DenseLayer::init(fan_in, out, act, rng));
            fan_in = out;
        }
        Self::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer<T>] {
        &mut self.layers
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].input_size()
    }

    pub fn output_size(&self) -> usize {
        self.layers[self.layers.len() - 1].output_size()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        let mut x = input.to_vec();
        for layer in &self.layers {
            x = layer.forward(&x)?.1;
        }
        Ok(x)
    }

    pub fn forward_trace(&self, input: &[T]) -> Result<ForwardTrace<T>> {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        let mut x = input.to_vec();
        for layer in &self.layers {
            let (pre, out) = layer.forward(&x)?;
            inputs.push(std::mem::replace(&mut x, out));
            pre_activations.push(pre);
        }
        Ok(ForwardTrace {
            inputs,
            pre_activations,
            output: x,
        })
    }

    /// Reverse-mode pass over a cached trace. Returns parameter gradients and `∂L/∂input`.
    pub fn backward(&self, trace: &ForwardTrace<T>, output_grad: &[T]) -> Result<(GradientSet<T>, Vec<T>)> {
        if output_grad.len() != self.output_size() {
            return Err(Error::dims("output gradient", self.output_size(), output_grad.len()));
        }
        if trace.inputs.len() != self.layers.len() {
            return Err(Error::dims("forward trace depth", self.layers.len(), trace.inputs.len()));
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut upstream = output_grad.to_vec();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let (g, down) = layer.backward(&trace.inputs[k], &trace.pre_activations[k], &upstream)?;
            grads.push(g);
            upstream = down;
        }
        grads.reverse();
        Ok((GradientSet::new(grads), upstream))
    }
}

/// Gradients of all weights and biases for `output_grad = ∂L/∂output` at `input`.
pub fn mlp_backward<T: Scalar>(model: &Mlp<T>, input: &[T], output_grad: &[T]) -> Result<GradientSet<T>> {
    let trace = model.forward_trace(input)?;
    Ok(model.backward(&trace, output_grad)?.0)
}

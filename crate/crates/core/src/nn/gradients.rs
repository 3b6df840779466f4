use super::{Matrix2, Mlp};
use crate::{Error, Result, Scalar};

/// Gradient of one dense layer's weights and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad<T> {
    pub weights: Matrix2<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> LayerGrad<T> {
    pub fn new(weights: Matrix2<T>, bias: Vec<T>) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::dims("gradient bias", weights.rows(), bias.len()));
        }
        Ok(Self { weights, bias })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            weights: Matrix2::zeros(rows, cols),
            bias: vec![T::zero(); rows],
        }
    }

    fn congruent(&self, other: &Self) -> bool {
        self.weights.shape() == other.weights.shape() && self.bias.len() == other.bias.len()
    }

    fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.weights.values().iter().chain(&self.bias).copied()
    }
}

/// Per-layer gradients, shaped like the [`Mlp`] they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet<T> {
    layers: Vec<LayerGrad<T>>,
}

impl<T: Scalar> GradientSet<T> {
    pub fn new(layers: Vec<LayerGrad<T>>) -> Self {
        Self { layers }
    }

    pub fn zeros_like(model: &Mlp<T>) -> Self {
        Self {
            layers: model
                .layers()
                .iter()
                .map(|l| LayerGrad::zeros(l.output_size(), l.input_size()))
                .collect(),
        }
    }

    pub fn layers(&self) -> &[LayerGrad<T>] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<LayerGrad<T>> {
        self.layers
    }

    pub fn is_congruent(&self, other: &Self) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| a.congruent(b))
    }

    pub fn matches_model(&self, model: &Mlp<T>) -> bool {
        self.layers.len() == model.layers().len()
            && self.layers.iter().zip(model.layers()).all(|(g, l)| {
                g.weights.shape() == l.weights().shape() && g.bias.len() == l.bias().len()
            })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if !self.is_congruent(other) {
            return Err(Error::invalid("gradient sets have different shapes"));
        }
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, &y) in a.weights.values_mut().iter_mut().zip(b.weights.values()) {
                *x += y;
            }
            for (x, &y) in a.bias.iter_mut().zip(&b.bias) {
                *x += y;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: T) {
        for l in &mut self.layers {
            for x in l.weights.values_mut() {
                *x *= factor;
            }
            for x in &mut l.bias {
                *x *= factor;
            }
        }
    }

    /// All entries, layer by layer, weights before bias.
    pub fn flatten(&self) -> Vec<T> {
        self.layers.iter().flat_map(LayerGrad::iter).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().flat_map(LayerGrad::iter).all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().flat_map(LayerGrad::iter).all(|v| v == T::zero())
    }

    /// Largest `|a - b| / max(|a|, |b|, 1e-6)` over all entries.
    pub fn max_relative_error(&self, other: &Self) -> Result<T> {
        if !self.is_congruent(other) {
            return Err(Error::invalid("gradient sets have different shapes"));
        }
        let floor = T::lit(1e-6);
        Ok(self
            .flatten()
            .into_iter()
            .zip(other.flatten())
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(floor))
            .fold(T::zero(), T::max))
    }
}

/// One plain SGD update, `θ ← θ − lr·∇θ`, returning the updated model.
pub fn sgd_step<T: Scalar>(model: &Mlp<T>, grads: &GradientSet<T>, learning_rate: T) -> Result<Mlp<T>> {
    let mut next = model.clone();
    next.apply_gradients(grads, learning_rate)?;
    Ok(next)
}

impl<T: Scalar> Mlp<T> {
    /// In-place form of [`sgd_step`].
    pub fn apply_gradients(&mut self, grads: &GradientSet<T>, learning_rate: T) -> Result<()> {
        if !grads.matches_model(self) {
            return Err(Error::invalid("gradient set does not match model shape"));
        }
        for (layer, g) in self.layers_mut().iter_mut().zip(grads.layers()) {
            apply_layer(layer, g, learning_rate);
        }
        Ok(())
    }
}

pub(crate) fn apply_layer<T: Scalar>(layer: &mut super::DenseLayer<T>, g: &LayerGrad<T>, lr: T) {
    for (w, &d) in layer.weights_mut().values_mut().iter_mut().zip(g.weights.values()) {
        *w -= lr * d;
    }
    for (b, &d) in layer.bias_mut().iter_mut().zip(&g.bias) {
        *b -= lr * d;
    }
}

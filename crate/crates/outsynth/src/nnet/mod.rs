//! Dense feed-forward networks with reverse-mode gradients.
//!
//! This is the substrate for the feature autoencoders, the fusion VAE and the
//! MLP classifier. Design choices that the rest of the crate relies on:
//!
//! * Weights are stored as `f64` but kept **exactly representable in `f32`**:
//!   they are rounded through `f32` at initialization and after every
//!   optimizer step. Model files serialize weights as little-endian `f32`, so
//!   save/load round-trips are bit-exact, while all forward/backward
//!   arithmetic runs in `f64` so finite-difference gradient checks hold to
//!   tight tolerances.
//! * `backward` is pure chain rule: the caller supplies `dL/d(output)`
//!   including any mean-reduction factors, and receives parameter gradients
//!   plus `dL/d(input)` (needed by the fusion stage, where the VAE's input is
//!   itself produced by the encoders).
//! * Initialization is Glorot uniform, `U(-a, a)` with
//!   `a = sqrt(6 / (fan_in + fan_out))`, biases zero.

mod loss;
mod optim;
mod train;

pub use loss::{Loss, BCE_CLAMP};
pub use optim::{round_weights_to_f32, OptimState, Optimizer};
pub use train::{train_step, train_supervised, TrainConfig};

use ndarray::{Array1, Array2, Axis};
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Tanh,
    Linear,
}

impl Activation {
    pub fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed in terms of the activation *output* `a`.
    /// For relu the convention at the kink is `relu'(0) = 0`.
    fn deriv_from_output(&self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Tanh => 1.0 - a * a,
            Activation::Linear => 1.0,
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "linear" => Ok(Activation::Linear),
            other => Err(Error::config(format!(
                "unknown activation '{other}' (expected relu|sigmoid|tanh|linear)"
            ))),
        }
    }
}

/// One dense layer: `a = act(x W^T + b)` with `W` of shape `[out, in]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Layer {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
    pub act: Activation,
}

impl Layer {
    pub fn fan_in(&self) -> usize {
        self.w.ncols()
    }

    pub fn fan_out(&self) -> usize {
        self.w.nrows()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DenseNet {
    pub layers: Vec<Layer>,
}

/// Activations recorded during a forward pass; consumed by `backward`.
#[derive(Debug)]
pub struct ForwardCache {
    input: Array2<f64>,
    /// `outputs[i]` is the activation of layer `i`; the last entry is the
    /// network output.
    outputs: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &Array2<f64> {
        self.outputs.last().expect("net has at least one layer")
    }
}

/// Parameter gradients, same shapes as the layers they belong to.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<(Array2<f64>, Array1<f64>)>,
}

impl DenseNet {
    /// Build a network with the given layer widths (`sizes[0]` is the input
    /// dimension) and one activation per layer. Weights are Glorot-uniform,
    /// biases zero, everything rounded to `f32`-exact values.
    pub fn new(sizes: &[usize], acts: &[Activation], rng: &mut impl Rng) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::config(
                "network needs at least an input and an output size",
            ));
        }
        if acts.len() != sizes.len() - 1 {
            return Err(Error::config(format!(
                "got {} activations for {} layers",
                acts.len(),
                sizes.len() - 1
            )));
        }
        if let Some(&zero) = sizes.iter().find(|&&s| s == 0) {
            return Err(Error::config(format!("layer width must be >= 1, got {zero}")));
        }
        let mut layers = Vec::with_capacity(acts.len());
        for (i, &act) in acts.iter().enumerate() {
            let (fan_in, fan_out) = (sizes[i], sizes[i + 1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w = Array2::from_shape_fn((fan_out, fan_in), |_| {
                rng.random_range(-limit..limit)
            });
            let b = Array1::zeros(fan_out);
            layers.push(Layer { w, b, act });
        }
        let mut net = DenseNet { layers };
        round_weights_to_f32(&mut net)?;
        Ok(net)
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().expect("nonempty").fan_out()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Forward pass for a batch `x` of shape `[n, in_dim]`.
    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut a = x.clone();
        for layer in &self.layers {
            a = self.layer_forward(layer, &a);
        }
        a
    }

    /// Forward pass that records per-layer activations for `backward`.
    pub fn forward_cached(&self, x: &Array2<f64>) -> ForwardCache {
        let mut outputs = Vec::with_capacity(self.layers.len());
        let mut a = x.clone();
        for layer in &self.layers {
            a = self.layer_forward(layer, &a);
            outputs.push(a.clone());
        }
        ForwardCache {
            input: x.clone(),
            outputs,
        }
    }

    fn layer_forward(&self, layer: &Layer, x: &Array2<f64>) -> Array2<f64> {
        debug_assert_eq!(x.ncols(), layer.fan_in());
        let mut z = x.dot(&layer.w.t());
        z += &layer.b;
        z.mapv_inplace(|v| layer.act.apply(v));
        z
    }

    /// Reverse-mode pass. `grad_out` is `dL/d(output)` of shape
    /// `[n, out_dim]`; returns parameter gradients and `dL/d(input)`.
    pub fn backward(&self, cache: &ForwardCache, grad_out: &Array2<f64>) -> (Gradients, Array2<f64>) {
        assert_eq!(
            grad_out.dim(),
            cache.output().dim(),
            "grad_out shape must match the cached output"
        );
        let n_layers = self.layers.len();
        let mut grads: Vec<(Array2<f64>, Array1<f64>)> = Vec::with_capacity(n_layers);
        let mut grad = grad_out.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let a = &cache.outputs[i];
            // dz = dL/da * act'(z), with act' computed from the output a.
            let mut dz = grad;
            ndarray::Zip::from(&mut dz).and(a).for_each(|g, &out| {
                *g *= layer.act.deriv_from_output(out);
            });
            let x_prev = if i == 0 { &cache.input } else { &cache.outputs[i - 1] };
            let dw = dz.t().dot(x_prev);
            let db = dz.sum_axis(Axis(0));
            grad = dz.dot(&layer.w);
            grads.push((dw, db));
        }
        grads.reverse();
        (Gradients { layers: grads }, grad)
    }
}

//! SGD and Adam parameter updates.
//!
//! After every update the weights are rounded through `f32` (see the module
//! docs in `nnet`); the rounding pass doubles as the finiteness check that
//! aborts diverged training runs.

use ndarray::{Array1, Array2};

use super::{DenseNet, Gradients};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    Sgd {
        lr: f64,
    },
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
    },
}

impl Optimizer {
    /// Adam with the standard moment coefficients.
    pub fn adam(lr: f64) -> Self {
        Optimizer::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn lr(&self) -> f64 {
        match *self {
            Optimizer::Sgd { lr } | Optimizer::Adam { lr, .. } => lr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lr = self.lr();
        if !(lr.is_finite() && lr > 0.0) {
            return Err(Error::config(format!("learning rate must be > 0, got {lr}")));
        }
        if let Optimizer::Adam { beta1, beta2, eps, .. } = *self {
            if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) {
                return Err(Error::config("adam betas must lie in [0, 1)"));
            }
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::config("adam eps must be > 0"));
            }
        }
        Ok(())
    }
}

impl Default for Optimizer {
    /// Adam, lr 1e-3: the training default throughout the crate.
    fn default() -> Self {
        Optimizer::adam(1e-3)
    }
}

/// Per-network optimizer state (Adam moments; empty for SGD).
#[derive(Debug, Clone)]
pub struct OptimState {
    /// (m_w, v_w, m_b, v_b) per layer.
    moments: Vec<(Array2<f64>, Array2<f64>, Array1<f64>, Array1<f64>)>,
    /// Update count, shared by all layers of the network.
    t: u64,
}

impl OptimState {
    pub fn new(net: &DenseNet) -> Self {
        let moments = net
            .layers
            .iter()
            .map(|l| {
                (
                    Array2::zeros(l.w.raw_dim()),
                    Array2::zeros(l.w.raw_dim()),
                    Array1::zeros(l.b.raw_dim()),
                    Array1::zeros(l.b.raw_dim()),
                )
            })
            .collect();
        OptimState { moments, t: 0 }
    }

    /// Apply one update in place, then round weights to `f32`-exact values.
    pub fn apply(
        &mut self,
        net: &mut DenseNet,
        opt: &Optimizer,
        grads: &Gradients,
    ) -> Result<()> {
        if grads.layers.len() != net.layers.len() {
            return Err(Error::numeric("gradient/network layer count mismatch"));
        }
        match *opt {
            Optimizer::Sgd { lr } => {
                for (layer, (dw, db)) in net.layers.iter_mut().zip(&grads.layers) {
                    layer.w.scaled_add(-lr, dw);
                    layer.b.scaled_add(-lr, db);
                }
            }
            Optimizer::Adam {
                lr,
                beta1,
                beta2,
                eps,
            } => {
                self.t += 1;
                let bc1 = 1.0 - beta1.powi(self.t as i32);
                let bc2 = 1.0 - beta2.powi(self.t as i32);
                for ((layer, (dw, db)), (mw, vw, mb, vb)) in net
                    .layers
                    .iter_mut()
                    .zip(&grads.layers)
                    .zip(&mut self.moments)
                {
                    adam_update(&mut layer.w, dw, mw, vw, lr, beta1, beta2, eps, bc1, bc2);
                    adam_update_1d(&mut layer.b, db, mb, vb, lr, beta1, beta2, eps, bc1, bc2);
                }
            }
        }
        round_weights_to_f32(net)
    }
}

#[allow(clippy::too_many_arguments)]
fn adam_update(
    w: &mut Array2<f64>,
    g: &Array2<f64>,
    m: &mut Array2<f64>,
    v: &mut Array2<f64>,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    bc1: f64,
    bc2: f64,
) {
    ndarray::Zip::from(w)
        .and(g)
        .and(m)
        .and(v)
        .for_each(|w, &g, m, v| {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *w -= lr * m_hat / (v_hat.sqrt() + eps);
        });
}

#[allow(clippy::too_many_arguments)]
fn adam_update_1d(
    w: &mut Array1<f64>,
    g: &Array1<f64>,
    m: &mut Array1<f64>,
    v: &mut Array1<f64>,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    bc1: f64,
    bc2: f64,
) {
    ndarray::Zip::from(w)
        .and(g)
        .and(m)
        .and(v)
        .for_each(|w, &g, m, v| {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *w -= lr * m_hat / (v_hat.sqrt() + eps);
        });
}

/// Round every parameter through `f32` and verify it stayed finite.
pub fn round_weights_to_f32(net: &mut DenseNet) -> Result<()> {
    let mut finite = true;
    for layer in &mut net.layers {
        layer.w.mapv_inplace(|v| {
            let r = v as f32 as f64;
            finite &= r.is_finite();
            r
        });
        layer.b.mapv_inplace(|v| {
            let r = v as f32 as f64;
            finite &= r.is_finite();
            r
        });
    }
    if finite {
        Ok(())
    } else {
        Err(Error::numeric(
            "network weights became non-finite after an optimizer step",
        ))
    }
}

//! Mini-batch training loop for supervised targets.
//!
//! The hierarchy stage (autoencoders + VAE) has its own joint loop in
//! `crate::hierarchy`; this loop serves the MLP classifier and tests.

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;

use super::{DenseNet, Loss, OptimState, Optimizer};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: Optimizer,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 128,
            optimizer: Optimizer::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be >= 1"));
        }
        self.optimizer.validate()
    }
}

/// One optimizer step on a single batch; returns the batch loss measured
/// before the update.
pub fn train_step(
    net: &mut DenseNet,
    state: &mut OptimState,
    opt: &Optimizer,
    x: &Array2<f64>,
    y: &Array2<f64>,
    loss: Loss,
) -> Result<f64> {
    let cache = net.forward_cached(x);
    let value = loss.value(cache.output(), y)?;
    if !value.is_finite() {
        return Err(Error::numeric(format!("batch loss is not finite: {value}")));
    }
    let grad_out = loss.grad(cache.output(), y)?;
    let (grads, _) = net.backward(&cache, &grad_out);
    state.apply(net, opt, &grads)?;
    Ok(value)
}

/// Shuffled mini-batch training. Returns the mean batch loss per epoch
/// (losses measured before each update, weighted by batch size).
///
/// Aborts with a numeric error carrying the epoch/batch position and the most
/// recent loss history if the loss stops being finite.
pub fn train_supervised(
    net: &mut DenseNet,
    x: &Array2<f64>,
    y: &Array2<f64>,
    loss: Loss,
    cfg: &TrainConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = x.nrows();
    if n == 0 {
        return Err(Error::data("cannot train on an empty dataset"));
    }
    if y.nrows() != n {
        return Err(Error::data(format!(
            "feature/target row mismatch: {} vs {}",
            n,
            y.nrows()
        )));
    }

    let mut shuffle_rng = rng::stream(cfg.seed, "nnet-shuffle");
    let mut state = OptimState::new(net);
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut recent = std::collections::VecDeque::with_capacity(5);
    let mut indices: Vec<usize> = (0..n).collect();

    for epoch in 0..cfg.epochs {
        indices.shuffle(&mut shuffle_rng);
        let mut epoch_sum = 0.0;
        for (batch_idx, batch) in indices.chunks(cfg.batch_size).enumerate() {
            let xb = x.select(Axis(0), batch);
            let yb = y.select(Axis(0), batch);
            let value = train_step(net, &mut state, &cfg.optimizer, &xb, &yb, loss)
                .map_err(|e| match e {
                    Error::Numeric(msg) => Error::numeric(format!(
                        "epoch {epoch}, batch {batch_idx}: {msg}; recent batch losses: {recent:?}"
                    )),
                    other => other,
                })?;
            if recent.len() == 5 {
                recent.pop_front();
            }
            recent.push_back(value);
            epoch_sum += value * batch.len() as f64;
        }
        epoch_losses.push(epoch_sum / n as f64);
    }
    Ok(epoch_losses)
}

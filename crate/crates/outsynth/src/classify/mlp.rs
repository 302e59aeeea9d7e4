//! MLP classifier: two relu hidden layers and a sigmoid output unit,
//! trained with binary cross-entropy through the shared network stack.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::nnet::{Activation, DenseNet, Loss, TrainConfig};
use crate::rng;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MlpParams {
    pub hidden: usize,
    pub train: TrainConfig,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: 32,
            train: TrainConfig {
                epochs: 100,
                batch_size: 64,
                ..TrainConfig::default()
            },
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::config("mlp hidden width must be >= 1"));
        }
        self.train.validate()
    }
}

/// The classifier network: `[d, hidden, hidden, 1]` with relu hidden layers
/// and a sigmoid output.
pub fn mlp_net(input_dim: usize, hidden: usize, seed: u64) -> Result<DenseNet> {
    let mut init_rng = rng::stream(seed, "mlp-init");
    DenseNet::new(
        &[input_dim, hidden, hidden, 1],
        &[Activation::Relu, Activation::Relu, Activation::Sigmoid],
        &mut init_rng,
    )
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MlpClassifier {
    pub net: DenseNet,
    pub params: MlpParams,
}

impl MlpClassifier {
    /// Centered probability: `p(inlier) - 1/2`, so `> 0` means inlier.
    pub fn decision_score(&self, x: &[f64]) -> f64 {
        let input = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("row vector");
        let p = self.net.forward(&input)[[0, 0]];
        p - 0.5
    }
}

pub fn mlp_fit(
    pos: &Array2<f64>,
    neg: &Array2<f64>,
    params: &MlpParams,
    seed: u64,
) -> Result<MlpClassifier> {
    params.validate()?;
    if pos.nrows() == 0 || neg.nrows() == 0 {
        return Err(Error::data(format!(
            "mlp needs both classes non-empty, got {} positive / {} negative",
            pos.nrows(),
            neg.nrows()
        )));
    }
    if pos.ncols() != neg.ncols() {
        return Err(Error::data("mlp class dimensions differ"));
    }
    if pos.iter().chain(neg.iter()).any(|v| !v.is_finite()) {
        return Err(Error::numeric("mlp training data contains non-finite values"));
    }
    let n_pos = pos.nrows();
    let n = n_pos + neg.nrows();
    let mut x = Array2::zeros((n, pos.ncols()));
    x.slice_mut(ndarray::s![..n_pos, ..]).assign(pos);
    x.slice_mut(ndarray::s![n_pos.., ..]).assign(neg);
    let mut targets = Array2::zeros((n, 1));
    for i in 0..n_pos {
        targets[[i, 0]] = 1.0;
    }

    let mut net = mlp_net(pos.ncols(), params.hidden, seed)?;
    let mut train_cfg = params.train.clone();
    train_cfg.seed = seed;
    crate::nnet::train_supervised(&mut net, &x, &targets, Loss::Bce, &train_cfg)?;
    Ok(MlpClassifier {
        net,
        params: params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn blob(n: usize, center: f64, seed: u64) -> Array2<f64> {
        let mut rng = crate::rng::stream(seed, "mlp-blob");
        let mut x = Array2::zeros((n, 2));
        for v in x.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = z + center;
        }
        x
    }

    #[test]
    fn separable_blobs_classify_accurately() {
        let pos = blob(200, 2.5, 1);
        let neg = blob(200, -2.5, 2);
        let model = mlp_fit(&pos, &neg, &MlpParams::default(), 7).unwrap();
        let mut correct = 0;
        for row in pos.rows() {
            if model.decision_score(row.as_slice().unwrap()) > 0.0 {
                correct += 1;
            }
        }
        for row in neg.rows() {
            if model.decision_score(row.as_slice().unwrap()) < 0.0 {
                correct += 1;
            }
        }
        let acc = correct as f64 / 400.0;
        assert!(acc >= 0.97, "accuracy {acc}");
    }

    #[test]
    fn same_seed_reproduces_scores() {
        let pos = blob(50, 1.0, 3);
        let neg = blob(50, -1.0, 4);
        let a = mlp_fit(&pos, &neg, &MlpParams::default(), 11).unwrap();
        let b = mlp_fit(&pos, &neg, &MlpParams::default(), 11).unwrap();
        assert_eq!(a.decision_score(&[0.4, -0.2]), b.decision_score(&[0.4, -0.2]));
        let c = mlp_fit(&pos, &neg, &MlpParams::default(), 12).unwrap();
        assert_ne!(a.decision_score(&[0.4, -0.2]), c.decision_score(&[0.4, -0.2]));
    }

    #[test]
    fn rejects_single_class_input() {
        let pos = blob(10, 0.0, 5);
        let empty: Array2<f64> = Array2::zeros((0, 2));
        assert!(mlp_fit(&pos, &empty, &MlpParams::default(), 0).is_err());
        assert!(mlp_fit(&empty, &pos, &MlpParams::default(), 0).is_err());
    }
}

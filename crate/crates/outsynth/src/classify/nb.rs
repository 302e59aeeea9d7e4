//! Gaussian naive Bayes with per-class diagonal variances.
//!
//! The decision score is the log-odds `log p(+1|x) - log p(-1|x)` computed
//! from class priors and independent per-dimension Gaussians; variances are
//! floored to keep the densities finite on (near-)constant features.

use ndarray::Array2;

use crate::error::{Error, Result};

pub const NB_VAR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NbParams {
    pub var_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams {
            var_floor: NB_VAR_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaussianNb {
    pub mean_pos: Vec<f64>,
    pub var_pos: Vec<f64>,
    pub mean_neg: Vec<f64>,
    pub var_neg: Vec<f64>,
    pub log_prior_pos: f64,
    pub log_prior_neg: f64,
}

fn class_stats(x: &Array2<f64>, floor: f64) -> (Vec<f64>, Vec<f64>) {
    let n = x.nrows() as f64;
    let d = x.ncols();
    let mut mean = vec![0.0; d];
    for row in x.rows() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    // Population variance (divide by n), floored.
    let mut var = vec![0.0; d];
    for row in x.rows() {
        for ((acc, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
            let e = v - m;
            *acc += e * e;
        }
    }
    for v in &mut var {
        *v = (*v / n).max(floor);
    }
    (mean, var)
}

pub fn nb_fit(pos: &Array2<f64>, neg: &Array2<f64>, params: &NbParams) -> Result<GaussianNb> {
    if !(params.var_floor.is_finite() && params.var_floor > 0.0) {
        return Err(Error::config(format!(
            "nb variance floor must be > 0, got {}",
            params.var_floor
        )));
    }
    if pos.nrows() == 0 || neg.nrows() == 0 {
        return Err(Error::data(format!(
            "naive bayes needs both classes non-empty, got {} positive / {} negative",
            pos.nrows(),
            neg.nrows()
        )));
    }
    if pos.ncols() != neg.ncols() {
        return Err(Error::data("naive bayes class dimensions differ"));
    }
    if pos.iter().chain(neg.iter()).any(|v| !v.is_finite()) {
        return Err(Error::numeric("naive bayes training data contains non-finite values"));
    }
    let (mean_pos, var_pos) = class_stats(pos, params.var_floor);
    let (mean_neg, var_neg) = class_stats(neg, params.var_floor);
    let total = (pos.nrows() + neg.nrows()) as f64;
    Ok(GaussianNb {
        mean_pos,
        var_pos,
        mean_neg,
        var_neg,
        log_prior_pos: (pos.nrows() as f64 / total).ln(),
        log_prior_neg: (neg.nrows() as f64 / total).ln(),
    })
}

fn log_likelihood(x: &[f64], mean: &[f64], var: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((&v, &m), &s2) in x.iter().zip(mean).zip(var) {
        let e = v - m;
        acc += -0.5 * ((2.0 * std::f64::consts::PI * s2).ln() + e * e / s2);
    }
    acc
}

impl GaussianNb {
    /// Log-odds of the inlier class; `> 0` means inlier.
    pub fn decision_score(&self, x: &[f64]) -> f64 {
        let pos = self.log_prior_pos + log_likelihood(x, &self.mean_pos, &self.var_pos);
        let neg = self.log_prior_neg + log_likelihood(x, &self.mean_neg, &self.var_neg);
        pos - neg
    }

    /// Posterior probability of the inlier class.
    pub fn posterior(&self, x: &[f64]) -> f64 {
        1.0 / (1.0 + (-self.decision_score(x)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;
    use rand_distr::{Distribution, StandardNormal};

    fn blob(n: usize, center: f64, seed: u64) -> Array2<f64> {
        let mut rng = crate::rng::stream(seed, "nb-blob");
        let mut x = Array2::zeros((n, 2));
        for v in x.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = z + center;
        }
        x
    }

    #[test]
    fn well_separated_blobs_classify_accurately() {
        let pos = blob(500, 3.0, 1);
        let neg = blob(500, -3.0, 2);
        let model = nb_fit(&pos, &neg, &NbParams::default()).unwrap();
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
        let acc = correct as f64 / 1000.0;
        assert!(acc >= 0.99, "accuracy {acc}");
    }

    #[test]
    fn symmetric_point_has_half_posterior() {
        // Mirror-image classes with equal priors: any point on the symmetry
        // axis gets posterior exactly 0.5.
        let pos = arr2(&[[1.0, 0.5], [2.0, -0.5]]);
        let neg = arr2(&[[-1.0, 0.5], [-2.0, -0.5]]);
        let model = nb_fit(&pos, &neg, &NbParams::default()).unwrap();
        let p = model.posterior(&[0.0, 3.0]);
        assert_eq!(p, 0.5);
        assert_eq!(model.decision_score(&[0.0, -1.0]), 0.0);
    }

    #[test]
    fn decision_invariant_under_affine_rescaling() {
        let pos = blob(60, 1.5, 3);
        let neg = blob(60, -1.5, 4);
        let model = nb_fit(&pos, &neg, &NbParams::default()).unwrap();
        // x' = a * x + b per feature, applied to train and test consistently.
        let a = [3.0, 0.25];
        let b = [-7.0, 2.0];
        let transform = |x: &Array2<f64>| {
            let mut t = x.clone();
            for mut row in t.rows_mut() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = a[j] * *v + b[j];
                }
            }
            t
        };
        let model_t = nb_fit(&transform(&pos), &transform(&neg), &NbParams::default()).unwrap();
        for probe in [[0.3, -0.4], [2.0, 2.0], [-1.0, 0.1]] {
            let raw = model.decision_score(&probe);
            let tp = [a[0] * probe[0] + b[0], a[1] * probe[1] + b[1]];
            let got = model_t.decision_score(&tp);
            assert!((raw - got).abs() < 1e-9, "{raw} vs {got}");
        }
    }

    #[test]
    fn variance_floor_handles_constant_features() {
        let pos = arr2(&[[1.0, 5.0], [2.0, 5.0]]); // dim 1 constant
        let neg = arr2(&[[-1.0, 5.0], [-2.0, 5.0]]);
        let model = nb_fit(&pos, &neg, &NbParams::default()).unwrap();
        assert_eq!(model.var_pos[1], NB_VAR_FLOOR);
        assert!(model.decision_score(&[0.5, 5.0]).is_finite());
    }

    #[test]
    fn rejects_single_class_input() {
        let pos = blob(10, 0.0, 5);
        let empty: Array2<f64> = Array2::zeros((0, 2));
        assert!(nb_fit(&pos, &empty, &NbParams::default()).is_err());
        assert!(nb_fit(&empty, &pos, &NbParams::default()).is_err());
    }
}

//! One-class SVM (nu-parameterized), the baseline classifier for ablation
//! rows that run without synthesized negatives.
//!
//! Dual problem: minimize `1/2 sum_ij alpha_i alpha_j K_ij` subject to
//! `0 <= alpha_i <= 1/(nu*n)` and `sum_i alpha_i = 1`. The decision function
//! is `f(x) = sum_i alpha_i K(x_i, x) - rho`, with `rho` chosen so free
//! support vectors sit on `f = 0`. The nu property follows: at most a
//! `nu` fraction of training points fall outside (`f < 0`, up to the
//! boundary-point slack).

use ndarray::Array2;

use crate::classify::svm::{Kernel, KernelCache};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OneClassParams {
    pub kernel: Kernel,
    pub gamma: f64,
    pub nu: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub cache_rows: usize,
}

impl Default for OneClassParams {
    fn default() -> Self {
        OneClassParams {
            kernel: Kernel::Rbf,
            gamma: 1.0,
            nu: 0.5,
            tol: 1e-3,
            max_passes: 200_000,
            cache_rows: 1024,
        }
    }
}

impl OneClassParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::config(format!(
                "one-class gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::config(format!(
                "one-class nu must be in (0, 1], got {}",
                self.nu
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::config("one-class tol must be > 0"));
        }
        if self.max_passes == 0 {
            return Err(Error::config("one-class max_passes must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OneClassSvm {
    pub params: OneClassParams,
    pub support_x: Array2<f64>,
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub converged: bool,
    pub passes: usize,
}

impl OneClassSvm {
    /// `f(x) = sum_i alpha_i K(x_i, x) - rho`; `>= 0` means inlier.
    pub fn decision_score(&self, x: &[f64]) -> f64 {
        let mut acc = -self.rho;
        for (i, row) in self.support_x.rows().into_iter().enumerate() {
            acc += self.alpha[i]
                * self
                    .params
                    .kernel
                    .eval(self.params.gamma, row.as_slice().expect("contiguous"), x);
        }
        acc
    }
}

/// Fit on positives only (no negatives exist in the zero-shot setting when
/// synthesis is disabled).
pub fn one_class_fit(pos: &Array2<f64>, params: &OneClassParams) -> Result<OneClassSvm> {
    params.validate()?;
    let n = pos.nrows();
    if n < 2 {
        return Err(Error::data(format!(
            "one-class svm needs at least 2 training points, got {n}"
        )));
    }
    if pos.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("one-class training data contains non-finite values"));
    }

    let ub = 1.0 / (params.nu * n as f64);
    // Feasible start: the first floor(nu*n) points at the upper bound, one
    // partial remainder, rest zero; sums to 1 exactly up to rounding.
    let mut alpha = vec![0.0f64; n];
    let full = (params.nu * n as f64).floor() as usize;
    for a in alpha.iter_mut().take(full.min(n)) {
        *a = ub;
    }
    if full < n {
        alpha[full] = 1.0 - full as f64 * ub;
    }

    let mut cache = KernelCache::new(pos, params.kernel, params.gamma, params.cache_rows);
    // G_i = (K alpha)_i.
    let mut g = vec![0.0f64; n];
    for i in 0..n {
        if alpha[i] > 0.0 {
            let row = cache.row(i);
            for k in 0..n {
                g[k] += alpha[i] * row[k];
            }
        }
    }

    let mut converged = false;
    let mut passes = 0;
    let (mut last_up, mut last_down) = (0.0, 0.0);
    for pass in 0..params.max_passes {
        passes = pass;
        // i: smallest gradient among points that can grow;
        // j: largest gradient among points that can shrink.
        let mut gi = f64::INFINITY;
        let mut gj = f64::NEG_INFINITY;
        let (mut i_sel, mut j_sel) = (usize::MAX, usize::MAX);
        for k in 0..n {
            if alpha[k] < ub && g[k] < gi {
                gi = g[k];
                i_sel = k;
            }
            if alpha[k] > 0.0 && g[k] > gj {
                gj = g[k];
                j_sel = k;
            }
        }
        last_up = gi;
        last_down = gj;
        if gj - gi <= params.tol {
            converged = true;
            break;
        }
        let (i, j) = (i_sel, j_sel);
        let ki = cache.row(i);
        let kj = cache.row(j);
        let mut eta = ki[i] + kj[j] - 2.0 * ki[j];
        if eta <= 0.0 {
            eta = 1e-12;
        }
        let mut delta = (gj - gi) / eta;
        delta = delta.min(ub - alpha[i]).min(alpha[j]);
        if delta <= 0.0 {
            break;
        }
        alpha[i] += delta;
        alpha[j] -= delta;
        for k in 0..n {
            g[k] += delta * (ki[k] - kj[k]);
        }
    }

    // rho from free support vectors (0 < alpha < ub), falling back to the
    // midpoint of the final bound gradients.
    let free: Vec<usize> = (0..n)
        .filter(|&k| alpha[k] > 1e-12 && alpha[k] < ub - 1e-12)
        .collect();
    let rho = if free.is_empty() {
        (last_up + last_down) / 2.0
    } else {
        free.iter().map(|&k| g[k]).sum::<f64>() / free.len() as f64
    };

    let sv: Vec<usize> = (0..n).filter(|&k| alpha[k] > 1e-12).collect();
    let mut support_x = Array2::zeros((sv.len(), pos.ncols()));
    for (r, &k) in sv.iter().enumerate() {
        support_x.row_mut(r).assign(&pos.row(k));
    }
    Ok(OneClassSvm {
        params: *params,
        support_x,
        alpha: sv.iter().map(|&k| alpha[k]).collect(),
        rho,
        converged,
        passes: passes + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn blob(n: usize, center: f64, seed: u64) -> Array2<f64> {
        let mut rng = crate::rng::stream(seed, "oneclass-blob");
        let mut x = Array2::zeros((n, 2));
        for v in x.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = z + center;
        }
        x
    }

    #[test]
    fn tiny_nu_keeps_all_training_points_inside() {
        let x = blob(50, 0.0, 1);
        let params = OneClassParams {
            nu: 0.01,
            ..OneClassParams::default()
        };
        let model = one_class_fit(&x, &params).unwrap();
        assert!(model.converged);
        // Scores are exact up to the solver's KKT tolerance.
        for row in x.rows() {
            let s = model.decision_score(row.as_slice().unwrap());
            assert!(
                s >= -2.0 * params.tol,
                "training point scored {s} with nu -> 0"
            );
        }
    }

    #[test]
    fn far_probe_scores_negative() {
        let x = blob(80, 0.0, 2);
        let model = one_class_fit(&x, &OneClassParams::default()).unwrap();
        assert!(model.decision_score(&[25.0, -25.0]) < 0.0);
    }

    #[test]
    fn nu_bounds_the_training_outlier_fraction() {
        for nu in [0.2, 0.5] {
            let x = blob(100, 0.0, 3);
            let params = OneClassParams {
                nu,
                ..OneClassParams::default()
            };
            let model = one_class_fit(&x, &params).unwrap();
            // Strictly-outside points, excluding the boundary band the
            // approximate solver cannot resolve (free SVs sit within the
            // KKT tolerance of f = 0 and may dip epsilon-negative).
            let outside = x
                .rows()
                .into_iter()
                .filter(|r| model.decision_score(r.as_slice().unwrap()) < -2.0 * params.tol)
                .count();
            let frac = outside as f64 / x.nrows() as f64;
            assert!(frac <= nu + 0.05, "nu={nu}: outlier fraction {frac}");
        }
    }

    #[test]
    fn duals_satisfy_budget_and_bounds() {
        let x = blob(60, 1.0, 4);
        let params = OneClassParams {
            nu: 0.3,
            ..OneClassParams::default()
        };
        let model = one_class_fit(&x, &params).unwrap();
        let ub = 1.0 / (0.3 * 60.0);
        let total: f64 = model.alpha.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "sum alpha = {total}");
        for &a in &model.alpha {
            assert!(a > 0.0 && a <= ub + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = blob(10, 0.0, 5);
        let one = blob(1, 0.0, 6);
        assert!(one_class_fit(&one, &OneClassParams::default()).is_err());
        let bad_nu = OneClassParams {
            nu: 0.0,
            ..OneClassParams::default()
        };
        assert!(one_class_fit(&x, &bad_nu).is_err());
        let mut nan = x.clone();
        nan[[0, 0]] = f64::NAN;
        assert!(one_class_fit(&nan, &OneClassParams::default()).is_err());
    }
}

//! Binary C-SVM trained with sequential minimal optimization (SMO).
//!
//! Working-set selection is the maximal-violating-pair rule: at each pass we
//! pick `i` maximizing `-y_i G_i` among points that can move up and `j`
//! minimizing it among points that can move down, where `G` is the gradient
//! of the dual objective. The solver stops when the maximal KKT violation
//! `m - M` drops below `tol`, or after `max_passes` pair updates (in which
//! case the model is flagged as non-converged and kept best-effort).
//!
//! Kernel rows are memoized in a FIFO-evicting cache so repeated selections
//! of the same working points do not recompute their rows.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Kernel function. `gamma` is stored separately in the parameters; the
/// polynomial degree defaults to 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Kernel {
    /// `x . z`
    Linear,
    /// `(gamma * x . z + 1)^degree`
    Poly { degree: i32 },
    /// `exp(-gamma * |x - z|^2)`
    Rbf,
    /// `tanh(gamma * x . z)`
    Sigmoid,
}

impl Kernel {
    pub fn eval(&self, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => dot(a, b),
            Kernel::Poly { degree } => (gamma * dot(a, b) + 1.0).powi(*degree),
            Kernel::Rbf => {
                let mut acc = 0.0;
                for (x, z) in a.iter().zip(b) {
                    let e = x - z;
                    acc += e * e;
                }
                (-gamma * acc).exp()
            }
            Kernel::Sigmoid => (gamma * dot(a, b)).tanh(),
        }
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Kernel::Linear),
            "poly" => Ok(Kernel::Poly { degree: 3 }),
            "rbf" => Ok(Kernel::Rbf),
            "sigmoid" => Ok(Kernel::Sigmoid),
            other => Err(Error::config(format!(
                "unknown kernel '{other}' (expected linear|poly|rbf|sigmoid)"
            ))),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, z)| x * z).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SvmParams {
    pub kernel: Kernel,
    pub gamma: f64,
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
    /// Kernel cache capacity in rows.
    pub cache_rows: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            kernel: Kernel::Rbf,
            gamma: 1.0,
            c: 0.1,
            tol: 1e-3,
            max_passes: 200_000,
            cache_rows: 1024,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::config(format!("svm gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::config(format!("svm C must be > 0, got {}", self.c)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::config(format!("svm tol must be > 0, got {}", self.tol)));
        }
        if self.max_passes == 0 {
            return Err(Error::config("svm max_passes must be >= 1"));
        }
        if self.cache_rows < 2 {
            return Err(Error::config("svm cache_rows must be >= 2"));
        }
        if let Kernel::Poly { degree } = self.kernel {
            if degree < 1 {
                return Err(Error::config(format!("poly degree must be >= 1, got {degree}")));
            }
        }
        Ok(())
    }
}

/// FIFO-evicting cache of kernel matrix rows.
pub(crate) struct KernelCache<'a> {
    // Standard layout so rows can be viewed as slices; copies only when the
    // caller's matrix is not already row-major contiguous.
    x: ndarray::CowArray<'a, f64, ndarray::Ix2>,
    kernel: Kernel,
    gamma: f64,
    rows: HashMap<usize, Rc<Vec<f64>>>,
    order: VecDeque<usize>,
    cap: usize,
}

impl<'a> KernelCache<'a> {
    pub(crate) fn new(x: &'a Array2<f64>, kernel: Kernel, gamma: f64, cap: usize) -> Self {
        KernelCache {
            x: x.as_standard_layout(),
            kernel,
            gamma,
            rows: HashMap::new(),
            order: VecDeque::new(),
            cap: cap.max(2),
        }
    }

    pub(crate) fn row(&mut self, i: usize) -> Rc<Vec<f64>> {
        if let Some(r) = self.rows.get(&i) {
            return Rc::clone(r);
        }
        let xi = self.x.row(i);
        let xi = xi.as_slice().expect("training rows are contiguous");
        let row: Vec<f64> = (0..self.x.nrows())
            .map(|j| {
                let xj = self.x.row(j);
                self.kernel
                    .eval(self.gamma, xi, xj.as_slice().expect("contiguous"))
            })
            .collect();
        let row = Rc::new(row);
        if self.rows.len() >= self.cap {
            if let Some(old) = self.order.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.rows.insert(i, Rc::clone(&row));
        self.order.push_back(i);
        row
    }
}

/// A trained support-vector machine. Only the vectors with nonzero dual
/// coefficient are kept.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SvmModel {
    pub params: SvmParams,
    pub support_x: Array2<f64>,
    /// Dual coefficients `alpha_i` of the support vectors (`0 < alpha_i <= C`).
    pub alpha: Vec<f64>,
    /// Labels `y_i in {-1, +1}` of the support vectors.
    pub labels: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub passes: usize,
}

impl SvmModel {
    /// Signed margin `sum_i alpha_i y_i K(x_i, x) + b`; `> 0` means inlier.
    pub fn decision_score(&self, x: &[f64]) -> f64 {
        let mut acc = self.bias;
        for (i, row) in self.support_x.rows().into_iter().enumerate() {
            let k = self
                .params
                .kernel
                .eval(self.params.gamma, row.as_slice().expect("contiguous"), x);
            acc += self.alpha[i] * self.labels[i] * k;
        }
        acc
    }

    /// Verify the stored dual solution: box constraint on every coefficient
    /// and the equality constraint within `1e-6`.
    pub fn check_invariants(&self) -> Result<()> {
        for &a in &self.alpha {
            if !(0.0..=self.params.c + 1e-12).contains(&a) {
                return Err(Error::numeric(format!(
                    "dual coefficient {a} outside [0, C={}]",
                    self.params.c
                )));
            }
        }
        let balance: f64 = self
            .alpha
            .iter()
            .zip(&self.labels)
            .map(|(a, y)| a * y)
            .sum();
        if balance.abs() > 1e-6 {
            return Err(Error::numeric(format!(
                "dual equality constraint violated: sum alpha*y = {balance}"
            )));
        }
        Ok(())
    }
}

fn check_finite(name: &str, x: &Array2<f64>) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric(format!("{name} contains non-finite values")));
    }
    Ok(())
}

/// Train a binary SVM on positive (inlier) and negative (synthetic outlier)
/// vectors.
pub fn svm_fit(pos: &Array2<f64>, neg: &Array2<f64>, params: &SvmParams) -> Result<SvmModel> {
    params.validate()?;
    if pos.nrows() == 0 || neg.nrows() == 0 {
        return Err(Error::data(format!(
            "svm needs both classes non-empty, got {} positive / {} negative",
            pos.nrows(),
            neg.nrows()
        )));
    }
    if pos.ncols() != neg.ncols() {
        return Err(Error::data(format!(
            "svm class dimensions differ: {} vs {}",
            pos.ncols(),
            neg.ncols()
        )));
    }
    check_finite("svm positives", pos)?;
    check_finite("svm negatives", neg)?;

    let n_pos = pos.nrows();
    let n = n_pos + neg.nrows();
    let mut x = Array2::zeros((n, pos.ncols()));
    x.slice_mut(ndarray::s![..n_pos, ..]).assign(pos);
    x.slice_mut(ndarray::s![n_pos.., ..]).assign(neg);
    let y: Vec<f64> = (0..n).map(|i| if i < n_pos { 1.0 } else { -1.0 }).collect();

    let c = params.c;
    let mut alpha = vec![0.0f64; n];
    // G_i = (Q alpha)_i - 1; all-zero alpha gives -1 everywhere.
    let mut g = vec![-1.0f64; n];
    let mut cache = KernelCache::new(&x, params.kernel, params.gamma, params.cache_rows);
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            let r = x.row(k);
            let r = r.as_slice().expect("x is standard layout");
            params.kernel.eval(params.gamma, r, r)
        })
        .collect();

    let mut converged = false;
    let mut passes = 0;
    let (mut last_m, mut last_big_m) = (0.0, 0.0);
    for pass in 0..params.max_passes {
        passes = pass;
        // i: the maximal violation among coefficients that can grow.
        let mut m = f64::NEG_INFINITY;
        let mut big_m = f64::INFINITY;
        let mut i_sel = usize::MAX;
        for k in 0..n {
            let v = -y[k] * g[k];
            let up = (y[k] > 0.0 && alpha[k] < c) || (y[k] < 0.0 && alpha[k] > 0.0);
            let down = (y[k] > 0.0 && alpha[k] > 0.0) || (y[k] < 0.0 && alpha[k] < c);
            if up && v > m {
                m = v;
                i_sel = k;
            }
            if down && v < big_m {
                big_m = v;
            }
        }
        last_m = m;
        last_big_m = big_m;
        if m - big_m <= params.tol {
            converged = true;
            break;
        }
        let i = i_sel;
        let ki = cache.row(i);
        // j: the largest second-order objective decrease b^2 / a among
        // violating partners. First-order (most-violating) selection can
        // stall on pairs whose clamped update is a no-op; weighing the
        // curvature a = K_ii + K_jj - 2 K_ij avoids those pairs.
        let mut best = f64::INFINITY;
        let mut j_sel = usize::MAX;
        for k in 0..n {
            let down = (y[k] > 0.0 && alpha[k] > 0.0) || (y[k] < 0.0 && alpha[k] < c);
            if !down {
                continue;
            }
            let b = m + y[k] * g[k];
            if b <= 0.0 {
                continue;
            }
            let a = (diag[i] + diag[k] - 2.0 * ki[k]).max(1e-12);
            let score = -(b * b) / a;
            if score < best {
                best = score;
                j_sel = k;
            }
        }
        let j = j_sel;
        let kj = cache.row(j);
        let mut eta = ki[i] + kj[j] - 2.0 * ki[j];
        if eta <= 0.0 {
            eta = 1e-12;
        }
        let (ai_old, aj_old) = (alpha[i], alpha[j]);
        let (lo, hi) = if y[i] != y[j] {
            ((aj_old - ai_old).max(0.0), (c + aj_old - ai_old).min(c))
        } else {
            ((ai_old + aj_old - c).max(0.0), (ai_old + aj_old).min(c))
        };
        let mut aj = aj_old + y[j] * (y[i] * g[i] - y[j] * g[j]) / eta;
        aj = aj.clamp(lo, hi);
        let mut ai = ai_old + y[i] * y[j] * (aj_old - aj);
        // Snap rounding residue onto the box exactly, or phantom
        // sub-epsilon coefficients keep re-entering the working set.
        let snap = c * 1e-12;
        if ai < snap {
            ai = 0.0;
        } else if ai > c - snap {
            ai = c;
        }
        if aj < snap {
            aj = 0.0;
        } else if aj > c - snap {
            aj = c;
        }
        let (dai, daj) = (ai - ai_old, aj - aj_old);
        if dai == 0.0 && daj == 0.0 {
            // Numerically stuck pair; treat the current violation as final.
            break;
        }
        for k in 0..n {
            g[k] += y[k] * (y[i] * ki[k] * dai + y[j] * kj[k] * daj);
        }
        alpha[i] = ai;
        alpha[j] = aj;
        if !(ai.is_finite() && aj.is_finite()) {
            return Err(Error::numeric("svm dual update produced non-finite values"));
        }
    }

    // Bias from free support vectors (0 < alpha < C): b = -y_i G_i there.
    // Fall back to the midpoint of the final violation interval.
    let free: Vec<usize> = (0..n)
        .filter(|&k| alpha[k] > 0.0 && alpha[k] < c)
        .collect();
    let bias = if free.is_empty() {
        -(last_m + last_big_m) / 2.0
    } else {
        free.iter().map(|&k| -y[k] * g[k]).sum::<f64>() / free.len() as f64
    };

    let sv: Vec<usize> = (0..n).filter(|&k| alpha[k] > 0.0).collect();
    let mut support_x = Array2::zeros((sv.len(), x.ncols()));
    for (r, &k) in sv.iter().enumerate() {
        support_x.row_mut(r).assign(&x.row(k));
    }
    let model = SvmModel {
        params: *params,
        support_x,
        alpha: sv.iter().map(|&k| alpha[k]).collect(),
        labels: sv.iter().map(|&k| y[k]).collect(),
        bias,
        converged,
        passes: passes + 1,
    };
    model.check_invariants()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn linear_params(c: f64) -> SvmParams {
        SvmParams {
            kernel: Kernel::Linear,
            gamma: 1.0,
            c,
            ..SvmParams::default()
        }
    }

    #[test]
    fn two_point_separable_linear() {
        // +1 at (1,0), -1 at (-1,0): the analytic dual solution is
        // alpha = (1/2, 1/2), b = 0, and the boundary is x_1 = 0.
        let pos = arr2(&[[1.0, 0.0]]);
        let neg = arr2(&[[-1.0, 0.0]]);
        let model = svm_fit(&pos, &neg, &linear_params(1.0)).unwrap();
        assert!(model.converged);
        assert_eq!(model.alpha.len(), 2);
        for &a in &model.alpha {
            assert!((a - 0.5).abs() < 1e-9, "alpha {a}");
        }
        assert!(model.bias.abs() < 1e-9, "bias {}", model.bias);
        assert!(model.decision_score(&[0.5, 0.3]) > 0.0);
        assert!(model.decision_score(&[-0.5, -0.3]) < 0.0);
        // Both points are margin support vectors: |score| == 1 within tol.
        assert!((model.decision_score(&[1.0, 0.0]) - 1.0).abs() < 1e-3);
        assert!((model.decision_score(&[-1.0, 0.0]) + 1.0).abs() < 1e-3);
    }

    #[test]
    fn xor_with_rbf_reaches_full_training_accuracy() {
        let pos = arr2(&[[0.0, 0.0], [1.0, 1.0]]);
        let neg = arr2(&[[0.0, 1.0], [1.0, 0.0]]);
        let params = SvmParams {
            kernel: Kernel::Rbf,
            gamma: 1.0,
            c: 10.0,
            ..SvmParams::default()
        };
        let model = svm_fit(&pos, &neg, &params).unwrap();
        for row in pos.rows() {
            assert!(model.decision_score(row.as_slice().unwrap()) > 0.0);
        }
        for row in neg.rows() {
            assert!(model.decision_score(row.as_slice().unwrap()) < 0.0);
        }
    }

    #[test]
    fn conflicting_duplicate_points_stay_feasible() {
        // Same point with both labels: not separable, must not crash, and
        // the dual must stay feasible.
        let pos = arr2(&[[0.5, 0.5], [0.5, 0.5]]);
        let neg = arr2(&[[0.5, 0.5]]);
        let model = svm_fit(&pos, &neg, &linear_params(1.0)).unwrap();
        model.check_invariants().unwrap();
    }

    #[test]
    fn dual_constraints_hold_on_random_problems() {
        let mut rng = crate::rng::stream(88, "svm-random");
        use rand::Rng;
        use rand_distr::{Distribution, StandardNormal};
        for trial in 0..5 {
            let np = rng.random_range(5..40);
            let nn = rng.random_range(5..40);
            let d = rng.random_range(1..5);
            let mut pos = Array2::zeros((np, d));
            let mut neg = Array2::zeros((nn, d));
            for v in pos.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v = z + 1.0;
            }
            for v in neg.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v = z - 1.0;
            }
            for kernel in [
                Kernel::Linear,
                Kernel::Poly { degree: 3 },
                Kernel::Rbf,
                Kernel::Sigmoid,
            ] {
                let params = SvmParams {
                    kernel,
                    gamma: 0.7,
                    c: 1.0,
                    ..SvmParams::default()
                };
                let model = svm_fit(&pos, &neg, &params).unwrap();
                model.check_invariants().unwrap_or_else(|e| {
                    panic!("trial {trial} kernel {kernel:?}: {e}");
                });
            }
        }
    }

    #[test]
    fn decision_matches_brute_force_expansion() {
        let pos = arr2(&[[1.0, 0.2], [0.8, -0.1], [1.2, 0.4]]);
        let neg = arr2(&[[-1.0, 0.1], [-0.7, -0.3], [-1.1, 0.2]]);
        let params = SvmParams {
            kernel: Kernel::Rbf,
            gamma: 0.5,
            c: 2.0,
            ..SvmParams::default()
        };
        let model = svm_fit(&pos, &neg, &params).unwrap();
        let probes = [[0.3, 0.0], [-0.2, 0.5], [2.0, -1.0]];
        for p in &probes {
            // Independent re-evaluation of the kernel expansion.
            let mut want = model.bias;
            for (i, sv) in model.support_x.rows().into_iter().enumerate() {
                let mut dist2 = 0.0;
                for (a, b) in sv.iter().zip(p) {
                    dist2 += (a - b) * (a - b);
                }
                want += model.alpha[i] * model.labels[i] * (-0.5 * dist2).exp();
            }
            let got = model.decision_score(p);
            assert!((got - want).abs() < 1e-12, "probe {p:?}: {got} vs {want}");
        }
    }

    #[test]
    fn score_shifts_affinely_with_bias() {
        let pos = arr2(&[[1.0, 0.0]]);
        let neg = arr2(&[[-1.0, 0.0]]);
        let mut model = svm_fit(&pos, &neg, &linear_params(1.0)).unwrap();
        let before = model.decision_score(&[0.3, 0.4]);
        model.bias += 2.5;
        let after = model.decision_score(&[0.3, 0.4]);
        assert!((after - before - 2.5).abs() < 1e-12);
    }

    #[test]
    fn rbf_scaling_invariance() {
        // Scaling inputs by s and gamma by 1/s^2 leaves rbf predictions
        // unchanged on a fixed grid.
        let mut rng = crate::rng::stream(31, "svm-scale");
        use rand_distr::{Distribution, StandardNormal};
        let mut pos = Array2::zeros((20, 2));
        let mut neg = Array2::zeros((20, 2));
        for v in pos.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = z + 1.5;
        }
        for v in neg.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = z - 1.5;
        }
        let s = 3.0;
        let base = SvmParams {
            kernel: Kernel::Rbf,
            gamma: 1.0,
            c: 1.0,
            ..SvmParams::default()
        };
        let scaled = SvmParams {
            gamma: 1.0 / (s * s),
            ..base
        };
        let m1 = svm_fit(&pos, &neg, &base).unwrap();
        let m2 = svm_fit(&(&pos * s), &(&neg * s), &scaled).unwrap();
        for gx in -2..=2 {
            for gy in -2..=2 {
                let p = [gx as f64 * 0.8, gy as f64 * 0.8];
                let q = [p[0] * s, p[1] * s];
                let a = m1.decision_score(&p);
                let b = m2.decision_score(&q);
                assert_eq!(a > 0.0, b > 0.0, "grid point {p:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pass_cap_flags_non_convergence() {
        let mut rng = crate::rng::stream(19, "svm-cap");
        use rand_distr::{Distribution, StandardNormal};
        let mut pos = Array2::zeros((30, 2));
        let mut neg = Array2::zeros((30, 2));
        for v in pos.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        for v in neg.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let params = SvmParams {
            kernel: Kernel::Rbf,
            gamma: 1.0,
            c: 10.0,
            max_passes: 3,
            ..SvmParams::default()
        };
        let model = svm_fit(&pos, &neg, &params).unwrap();
        assert!(!model.converged);
        assert!(model.passes <= 3);
        model.check_invariants().unwrap();
        // Best-effort model still scores.
        assert!(model.decision_score(&[0.0, 0.0]).is_finite());
    }

    #[test]
    fn rejects_bad_inputs() {
        let pos = arr2(&[[1.0, 0.0]]);
        let neg = arr2(&[[-1.0, 0.0]]);
        let empty: Array2<f64> = Array2::zeros((0, 2));
        assert!(svm_fit(&pos, &empty, &linear_params(1.0)).is_err());
        assert!(svm_fit(&empty, &neg, &linear_params(1.0)).is_err());
        let nan = arr2(&[[f64::NAN, 0.0]]);
        assert!(svm_fit(&nan, &neg, &linear_params(1.0)).is_err());
        assert!(svm_fit(&pos, &neg, &linear_params(-1.0)).is_err());
        let wrong_dim = arr2(&[[1.0, 2.0, 3.0]]);
        assert!(svm_fit(&pos, &wrong_dim, &linear_params(1.0)).is_err());
    }
}

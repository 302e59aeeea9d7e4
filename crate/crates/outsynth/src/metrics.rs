//! Evaluation metrics: ROC-AUC, F1, TPR/FPR, and k-fold splits.
//!
//! ROC-AUC is computed by exact pair counting: sort the scores once, walk the
//! tie groups, and accumulate integer win/tie counters. The result equals the
//! probability that a random positive outranks a random negative (ties count
//! half), which is also the trapezoidal area under the ROC curve. Because the
//! counters are integers, the implementation and any brute-force pairwise
//! oracle agree to the last bit, not just to a tolerance.
//!
//! Convention used throughout the crate: **inlier is the positive class**,
//! and higher scores mean "more inlier".

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Area under the ROC curve. `labels[i] = true` marks a positive (inlier).
///
/// Errors if the scores contain NaN or if either class is empty (the AUC is
/// undefined then, and silently returning a number would mask broken folds).
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::numeric(format!(
            "roc_auc: {} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::numeric("roc_auc: NaN score"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count() as u128;
    let n_neg = labels.len() as u128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::numeric(
            "roc_auc: needs at least one positive and one negative",
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Walk ascending score order in tie groups. A positive in the current
    // group beats every negative strictly below it and half-ties with the
    // negatives inside the group.
    let mut wins: u128 = 0;
    let mut tie_pairs: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut pos_in_group: u128 = 0;
        let mut neg_in_group: u128 = 0;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if labels[order[j]] {
                pos_in_group += 1;
            } else {
                neg_in_group += 1;
            }
            j += 1;
        }
        wins += pos_in_group * neg_below;
        tie_pairs += pos_in_group * neg_in_group;
        neg_below += neg_in_group;
        i = j;
    }

    Ok((wins as f64 + 0.5 * tie_pairs as f64) / (n_pos * n_neg) as f64)
}

/// Threshold metrics for binary predictions. Positive class = inlier.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConfusionMetrics {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    /// Precision of the inlier class.
    pub precision: f64,
    /// Recall of the inlier class (equals `tpr`).
    pub recall: f64,
    /// F1 of the inlier class alone.
    pub f1_inlier: f64,
    /// Support-weighted mean of the inlier-class and outlier-class F1 scores.
    pub f1_weighted: f64,
    pub tpr: f64,
    pub fpr: f64,
    /// True when any ratio had a zero denominator and was reported as 0.
    pub degenerate: bool,
}

/// Compute confusion-matrix metrics. Ratios with zero denominators are
/// reported as 0.0 and flagged via `degenerate` instead of NaN.
pub fn confusion_metrics(pred_inlier: &[bool], true_inlier: &[bool]) -> Result<ConfusionMetrics> {
    if pred_inlier.len() != true_inlier.len() {
        return Err(Error::numeric(format!(
            "confusion_metrics: {} predictions vs {} labels",
            pred_inlier.len(),
            true_inlier.len()
        )));
    }
    if pred_inlier.is_empty() {
        return Err(Error::numeric("confusion_metrics: empty input"));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &t) in pred_inlier.iter().zip(true_inlier) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let mut degenerate = false;
    let mut ratio = |num: usize, den: usize| -> f64 {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };

    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let fpr = ratio(fp, fp + tn);
    // Outlier class viewed as its own positive.
    let precision_out = ratio(tn, tn + fn_);
    let recall_out = ratio(tn, tn + fp);
    drop(ratio);

    let f1 = |p: f64, r: f64, degenerate: &mut bool| {
        if p + r == 0.0 {
            *degenerate = true;
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    };
    let f1_inlier = f1(precision, recall, &mut degenerate);
    let f1_outlier = f1(precision_out, recall_out, &mut degenerate);
    let n_in = tp + fn_;
    let n_out = tn + fp;
    let f1_weighted =
        (n_in as f64 * f1_inlier + n_out as f64 * f1_outlier) / (n_in + n_out) as f64;

    Ok(ConfusionMetrics {
        tp,
        fp,
        tn,
        fn_,
        precision,
        recall,
        f1_inlier,
        f1_weighted,
        tpr: recall,
        fpr,
        degenerate,
    })
}

/// Shuffle `0..n` with the given seed and split into `k` folds whose sizes
/// differ by at most one (the first `n % k` folds get the extra element).
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::config(format!("k-fold needs k >= 2, got {k}")));
    }
    if n < k {
        return Err(Error::config(format!(
            "k-fold needs at least k samples: n={n}, k={k}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// Number of true outliers to mix into a test split so that outliers make up
/// `pct` percent of it: `round(pct / (100 - pct) * test_inliers)`.
pub fn outlier_count_for_pct(test_inliers: usize, pct: f64) -> Result<usize> {
    if !(pct > 0.0 && pct < 100.0) {
        return Err(Error::config(format!(
            "outlier percentage must be in (0, 100), got {pct}"
        )));
    }
    Ok((pct / (100.0 - pct) * test_inliers as f64).round() as usize)
}

/// Metrics of one evaluation fold. `f1` is the support-weighted mean of the
/// per-class F1 scores; the plain inlier-class F1 rides along because the two
/// conventions differ and reports show both.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FoldMetrics {
    pub auc: f64,
    pub f1: f64,
    pub f1_inlier: f64,
    pub precision: f64,
    pub recall: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    pub degenerate: bool,
}

impl FoldMetrics {
    pub fn from_scores(scores: &[f64], inlier: &[bool]) -> Result<FoldMetrics> {
        let auc = roc_auc(scores, inlier)?;
        let pred: Vec<bool> = scores.iter().map(|&s| s > 0.0).collect();
        let cm = confusion_metrics(&pred, inlier)?;
        Ok(FoldMetrics {
            auc,
            f1: cm.f1_weighted,
            f1_inlier: cm.f1_inlier,
            precision: cm.precision,
            recall: cm.recall,
            tpr: cm.tpr,
            fpr: cm.fpr,
            n_pos: inlier.iter().filter(|&&l| l).count(),
            n_neg: inlier.iter().filter(|&&l| !l).count(),
            degenerate: cm.degenerate,
        })
    }
}

/// Aggregated evaluation: unweighted mean of the per-fold metrics plus the
/// fold list itself. All rates lie in `[0, 1]`; `per_fold.len()` equals the
/// number of evaluation folds.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvalReport {
    pub auc: f64,
    pub f1: f64,
    pub f1_inlier: f64,
    pub precision: f64,
    pub recall: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub per_fold: Vec<FoldMetrics>,
    /// Total evaluated positives (inliers) across folds.
    pub n_pos: usize,
    /// Total evaluated negatives (true outliers) across folds.
    pub n_neg: usize,
    /// Hash of the canonical configuration text that produced this report.
    pub config_fingerprint: u64,
}

impl EvalReport {
    pub fn from_folds(per_fold: Vec<FoldMetrics>, config_fingerprint: u64) -> Result<EvalReport> {
        if per_fold.is_empty() {
            return Err(Error::numeric("eval report needs at least one fold"));
        }
        let k = per_fold.len() as f64;
        let mean = |f: fn(&FoldMetrics) -> f64| per_fold.iter().map(f).sum::<f64>() / k;
        Ok(EvalReport {
            auc: mean(|m| m.auc),
            f1: mean(|m| m.f1),
            f1_inlier: mean(|m| m.f1_inlier),
            precision: mean(|m| m.precision),
            recall: mean(|m| m.recall),
            tpr: mean(|m| m.tpr),
            fpr: mean(|m| m.fpr),
            n_pos: per_fold.iter().map(|m| m.n_pos).sum(),
            n_neg: per_fold.iter().map(|m| m.n_neg).sum(),
            per_fold,
            config_fingerprint,
        })
    }

    /// CSV rendering: one row per fold plus a `mean` row. Byte-deterministic
    /// for a given report (floats print via the shortest roundtrip form).
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("fold,auc,f1_weighted,f1_inlier,precision,recall,tpr,fpr,n_pos,n_neg\n");
        let mut row = |name: &str,
                       auc: f64,
                       f1: f64,
                       f1i: f64,
                       p: f64,
                       r: f64,
                       tpr: f64,
                       fpr: f64,
                       np: usize,
                       nn: usize| {
            out.push_str(&format!(
                "{name},{auc},{f1},{f1i},{p},{r},{tpr},{fpr},{np},{nn}\n"
            ));
        };
        for (i, m) in self.per_fold.iter().enumerate() {
            row(
                &i.to_string(),
                m.auc,
                m.f1,
                m.f1_inlier,
                m.precision,
                m.recall,
                m.tpr,
                m.fpr,
                m.n_pos,
                m.n_neg,
            );
        }
        row(
            "mean",
            self.auc,
            self.f1,
            self.f1_inlier,
            self.precision,
            self.recall,
            self.tpr,
            self.fpr,
            self.n_pos,
            self.n_neg,
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// O(n^2) pairwise definition; integer counters, so equality with the
    /// sort-based implementation is exact.
    fn auc_bruteforce(scores: &[f64], labels: &[bool]) -> f64 {
        let mut wins = 0u64;
        let mut ties = 0u64;
        let mut n_pos = 0u64;
        let mut n_neg = 0u64;
        for (i, &li) in labels.iter().enumerate() {
            if li {
                n_pos += 1;
                for (j, &lj) in labels.iter().enumerate() {
                    if !lj {
                        if scores[i] > scores[j] {
                            wins += 1;
                        } else if scores[i] == scores[j] {
                            ties += 1;
                        }
                    }
                }
            } else {
                n_neg += 1;
            }
        }
        (wins as f64 + 0.5 * ties as f64) / (n_pos * n_neg) as f64
    }

    #[test]
    fn auc_known_values() {
        // Perfect separation.
        let auc = roc_auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 1.0);
        // Perfectly wrong.
        let auc = roc_auc(&[0.1, 0.2, 0.8, 0.9], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 0.0);
        // All scores tied: chance level.
        let auc = roc_auc(&[0.5; 6], &[true, false, true, false, true, false]).unwrap();
        assert_eq!(auc, 0.5);
        // Hand-counted mix: pos scores {3, 1}, neg scores {2, 1}.
        // Pairs: (3,2) win, (3,1) win, (1,2) loss, (1,1) tie -> (2 + 0.5)/4.
        let auc = roc_auc(&[3.0, 1.0, 2.0, 1.0], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 2.5 / 4.0);
    }

    #[test]
    fn auc_matches_bruteforce_exactly_on_random_sets() {
        let mut rng = crate::rng::stream(99, "auc-test");
        for trial in 0..40 {
            let n = rng.random_range(2..60);
            // Coarse grid of scores forces plenty of ties.
            let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64 / 4.0).collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            labels[0] = true;
            labels[n - 1] = false;
            let fast = roc_auc(&scores, &labels).unwrap();
            let slow = auc_bruteforce(&scores, &labels);
            assert_eq!(fast, slow, "trial {trial}: fast {fast} != brute {slow}");
        }
    }

    #[test]
    fn auc_rejects_degenerate_input() {
        assert!(roc_auc(&[1.0, 2.0], &[true, true]).is_err());
        assert!(roc_auc(&[1.0, 2.0], &[false, false]).is_err());
        assert!(roc_auc(&[f64::NAN, 2.0], &[true, false]).is_err());
        assert!(roc_auc(&[1.0], &[true, false]).is_err());
    }

    #[test]
    fn confusion_hand_example() {
        // pred: T T F F F ; truth: T F T F F
        let m = confusion_metrics(
            &[true, true, false, false, false],
            &[true, false, true, false, false],
        )
        .unwrap();
        assert_eq!((m.tp, m.fp, m.tn, m.fn_), (1, 1, 2, 1));
        assert_eq!(m.precision, 0.5);
        assert_eq!(m.recall, 0.5);
        assert_eq!(m.tpr, 0.5);
        assert!((m.fpr - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.f1_inlier, 0.5);
        // Outlier class: precision 2/3, recall 2/3 -> f1 2/3.
        let expect_weighted = (2.0 * 0.5 + 3.0 * (2.0 / 3.0)) / 5.0;
        assert!((m.f1_weighted - expect_weighted).abs() < 1e-15);
        assert!(!m.degenerate);
    }

    #[test]
    fn zero_denominators_flagged_not_nan() {
        // Everything predicted outlier: precision denominator is 0.
        let m = confusion_metrics(&[false, false], &[true, false]).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.f1_inlier, 0.0);
        assert!(m.f1_weighted.is_finite());
    }

    #[test]
    fn kfold_partitions_evenly() {
        let folds = kfold_indices(10, 3, 7).unwrap();
        assert_eq!(folds.len(), 3);
        let sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 10);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn kfold_is_seeded() {
        assert_eq!(kfold_indices(20, 4, 1).unwrap(), kfold_indices(20, 4, 1).unwrap());
        assert_ne!(kfold_indices(20, 4, 1).unwrap(), kfold_indices(20, 4, 2).unwrap());
        assert!(kfold_indices(3, 5, 0).is_err());
        assert!(kfold_indices(10, 1, 0).is_err());
    }

    #[test]
    fn fold_metrics_and_report_aggregate() {
        // Scores: two inliers above zero, one below; one outlier above zero.
        let scores = [2.0, 1.0, -1.0, 0.5, -2.0, -3.0];
        let labels = [true, true, true, false, false, false];
        let m = FoldMetrics::from_scores(&scores, &labels).unwrap();
        // TP=2, FN=1, FP=1, TN=2.
        assert_eq!((m.n_pos, m.n_neg), (3, 3));
        assert!((m.tpr - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.fpr - 1.0 / 3.0).abs() < 1e-15);
        // AUC: pairs won = 8 of 9 (scores 2,1 beat all three; -1 beats -2,-3).
        assert_eq!(m.auc, 8.0 / 9.0);

        let report = EvalReport::from_folds(vec![m, m], 42).unwrap();
        assert_eq!(report.per_fold.len(), 2);
        assert_eq!(report.auc, m.auc);
        assert_eq!(report.n_pos, 6);
        assert_eq!(report.config_fingerprint, 42);
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 4); // header + 2 folds + mean
        assert!(csv.starts_with("fold,auc,"));
        assert!(csv.lines().last().unwrap().starts_with("mean,"));
        assert!(EvalReport::from_folds(vec![], 0).is_err());
    }

    #[test]
    fn outlier_counts() {
        // 50% means as many outliers as inliers.
        assert_eq!(outlier_count_for_pct(80, 50.0).unwrap(), 80);
        // 20%: 20/80 * 80 = 20.
        assert_eq!(outlier_count_for_pct(80, 20.0).unwrap(), 20);
        // 10%: 10/90 * 81 = 9.
        assert_eq!(outlier_count_for_pct(81, 10.0).unwrap(), 9);
        assert!(outlier_count_for_pct(10, 0.0).is_err());
        assert!(outlier_count_for_pct(10, 100.0).is_err());
    }
}

//! Experiment execution: feature extraction, one trainable stage
//! (hierarchy → catalog → outskirts → synthesis → classifier), the k-fold
//! cross-validation driver, holdout fit/eval, and run manifests.
//!
//! Every stochastic choice draws from a named substream of the master seed
//! (`folds`, `holdout`, `fold`/`outlier-mix` indexed by fold, and inside a
//! stage `synthesis` and `svm`), so any single stage can be re-run in
//! isolation and worker counts never change results.

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::boundary::{
    meta_stats, meta_stats_of, select_outskirts, select_outskirts_of, synthesize,
    synthesize_jitter, EpsMode, OutskirtSet, Synthesis, SynthesisConfig,
};
use crate::classify::{fit_classifier, TrainedClassifier};
use crate::data::ModelFile;
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::hierarchy::{fit_hierarchy, HierarchyModel, LatentCatalog};
use crate::metrics::{kfold_indices, outlier_count_for_pct, EvalReport, FoldMetrics};
use crate::pipeline::config::{AeMode, PipelineConfig, SynthesisMode};
use crate::pipeline::dataset::{Dataset, DatasetKind};
use crate::rng;

/// Per-descriptor matrices for one side (inliers or outliers) of a dataset,
/// after the `ae.mode=concatenated` rewrite.
pub type FeatureGroup = Vec<Array2<f64>>;

/// Extract the configured descriptors from one side of the dataset.
/// Vector datasets pass through as a single `raw` matrix;
/// `ae.mode=concatenated` joins all descriptors into one matrix.
pub fn features_of(cfg: &PipelineConfig, dataset: &Dataset, inliers: bool) -> Result<FeatureGroup> {
    let mut group = match &dataset.kind {
        DatasetKind::Images { inliers: ins, outliers: outs } => {
            let side = if inliers { ins } else { outs };
            extract_features(side, &cfg.feature_kinds())?
        }
        DatasetKind::Vectors { inliers: ins, outliers: outs } => {
            if cfg.features != ["raw"] {
                return Err(Error::config(format!(
                    "dataset '{}' provides plain vectors; image descriptors do not apply \
                     (set features=raw)",
                    dataset.source
                )));
            }
            let side = if inliers { ins } else { outs };
            vec![side.clone()]
        }
    };
    if cfg.ae_mode == AeMode::Concatenated && group.len() > 1 {
        group = vec![hstack(&group)?];
    }
    Ok(group)
}

fn hstack(mats: &[Array2<f64>]) -> Result<Array2<f64>> {
    let views: Vec<_> = mats.iter().map(|m| m.view()).collect();
    ndarray::concatenate(Axis(1), &views)
        .map_err(|e| Error::numeric(format!("feature concatenation failed: {e}")))
}

/// Select the given rows (ascending order expected) from every matrix.
pub fn slice_rows(group: &[Array2<f64>], rows: &[usize]) -> Vec<Array2<f64>> {
    group.iter().map(|m| m.select(Axis(0), rows)).collect()
}

/// One fully trained pipeline stage.
#[derive(Debug)]
pub struct FittedStage {
    pub model: HierarchyModel,
    pub catalog: Option<LatentCatalog>,
    /// Outskirt selection, when a latent space and selector exist.
    pub outskirts: Option<OutskirtSet>,
    /// Synthesized negatives, when synthesis ran.
    pub synthesis: Option<Synthesis>,
    /// Classifier training positives (latent representations of the
    /// training inliers).
    pub positives: Array2<f64>,
    pub classifier: TrainedClassifier,
    /// The (gamma, C) chosen on the validation split, when `svm.tune` ran.
    pub tuned_svm: Option<(f64, f64)>,
    /// Per-feature input dims and unit-interval flags, for persistence.
    pub feature_dims: Vec<usize>,
    pub unit_interval: Vec<bool>,
}

/// Train the full chain on training-inlier features. `stage_seed` scopes all
/// randomness of this stage; negatives count equals the training-inlier
/// count.
pub fn fit_stage(
    cfg: &PipelineConfig,
    train: &FeatureGroup,
    stage_seed: u64,
) -> Result<FittedStage> {
    let n_train = train.first().map_or(0, |m| m.nrows());
    let feature_dims: Vec<usize> = train.iter().map(|m| m.ncols()).collect();
    let unit_interval: Vec<bool> = train
        .iter()
        .map(|m| m.iter().all(|&v| (0.0..=1.0).contains(&v)))
        .collect();

    let fit = fit_hierarchy(train, &cfg.hierarchy_spec(), stage_seed)?;
    let positives = fit.model.represent(train)?;

    // Outskirt selection happens once; both the standard negative batch and
    // any tuning batch synthesize from the same set.
    let outskirts: Option<OutskirtSet> = match cfg.synthesis {
        SynthesisMode::Stochastic | SynthesisMode::Deterministic => {
            let catalog = fit.catalog.as_ref().ok_or_else(|| {
                Error::config("directional synthesis needs the distribution catalog (fusion=vae)")
            })?;
            let stats = meta_stats(catalog)?;
            Some(match cfg.selector {
                Some(rule) => select_outskirts(catalog, &stats, rule, cfg.alpha)?,
                // No selector: synthesize outward from every distribution.
                None => OutskirtSet {
                    indices: (0..catalog.len()).collect(),
                    rule: crate::boundary::SelectorRule::L2,
                    alpha: 0.0,
                    stats: stats.clone(),
                },
            })
        }
        SynthesisMode::Jitter => match cfg.selector {
            // Codes are the representation under fusion=ae.
            Some(rule) => {
                let stats = meta_stats_of(&positives)?;
                Some(select_outskirts_of(&positives, &stats, rule, cfg.alpha)?)
            }
            None => None,
        },
        SynthesisMode::None => None,
    };

    let negatives: Option<Synthesis> = if cfg.synthesis == SynthesisMode::None {
        None
    } else {
        Some(synthesize_negatives(
            cfg,
            fit.catalog.as_ref(),
            outskirts.as_ref(),
            &positives,
            n_train,
            rng::derive_seed(stage_seed, "synthesis"),
        )?)
    };

    let mut spec = cfg.classifier_spec();
    let mut tuned_svm = None;
    if cfg.svm_tune {
        let crate::classify::ClassifierSpec::Svm(base) = spec else {
            return Err(Error::config("svm.tune=true requires classifier=svm"));
        };
        let (gamma, c) = tune_svm(cfg, base, &positives, stage_seed, |count, seed| {
            synthesize_negatives(cfg, fit.catalog.as_ref(), outskirts.as_ref(), &positives, count, seed)
        })?;
        let mut params = base;
        params.gamma = gamma;
        params.c = c;
        spec = crate::classify::ClassifierSpec::Svm(params);
        tuned_svm = Some((gamma, c));
    }

    let classifier = fit_classifier(
        &spec,
        &positives,
        negatives.as_ref().map(|s| &s.samples),
        rng::derive_seed(stage_seed, "svm"),
    )?;
    if !classifier.converged() {
        return Err(Error::numeric(
            "classifier did not converge within its iteration budget; \
             adjust svm.c/svm.gamma or raise svm.tol",
        ));
    }

    Ok(FittedStage {
        model: fit.model,
        catalog: fit.catalog,
        outskirts,
        synthesis: negatives,
        positives,
        classifier,
        tuned_svm,
        feature_dims,
        unit_interval,
    })
}

/// Generate `count` synthetic negatives under the configured synthesis mode,
/// from the already-selected outskirts (directional) or codes (jitter).
fn synthesize_negatives(
    cfg: &PipelineConfig,
    catalog: Option<&crate::hierarchy::LatentCatalog>,
    outskirts: Option<&OutskirtSet>,
    positives: &Array2<f64>,
    count: usize,
    seed: u64,
) -> Result<Synthesis> {
    match cfg.synthesis {
        SynthesisMode::Stochastic | SynthesisMode::Deterministic => {
            let catalog = catalog.expect("checked by the caller");
            let set = outskirts.expect("directional synthesis always selects a set");
            let noise = match cfg.synthesis {
                SynthesisMode::Deterministic => EpsMode::Deterministic,
                _ => EpsMode::HalfNormal,
            };
            synthesize(
                catalog,
                set,
                &SynthesisConfig {
                    beta: cfg.beta,
                    noise,
                    count,
                    seed,
                },
            )
        }
        SynthesisMode::Jitter => {
            let subset: Vec<usize> = match outskirts {
                Some(set) => set.indices.clone(),
                None => (0..positives.nrows()).collect(),
            };
            synthesize_jitter(positives, &subset, cfg.jitter_sigma, count, seed)
        }
        SynthesisMode::None => Err(Error::config("no synthesis mode configured")),
    }
}

/// Pick (gamma, C) by validation AUC. The stage's training inliers split
/// into a tuning-train and a validation part (sized by the configured
/// train/val fractions); a fresh synthetic batch provides negatives for
/// both sides, so validation scores never touch true outliers.
/// Non-converging candidates are skipped; ties keep the first (grids are
/// scanned gamma-outer, C-inner).
fn tune_svm(
    cfg: &PipelineConfig,
    base: crate::classify::SvmParams,
    positives: &Array2<f64>,
    stage_seed: u64,
    negatives_for: impl Fn(usize, u64) -> Result<Synthesis>,
) -> Result<(f64, f64)> {
    const CANDIDATES: [f64; 4] = [0.01, 0.1, 1.0, 10.0];
    let n = positives.nrows();
    let val_frac = cfg.split.val / (cfg.split.train + cfg.split.val);
    let n_val = ((n as f64 * val_frac).round() as usize).max(1);
    if n_val + 2 > n {
        return Err(Error::data(format!(
            "svm.tune needs at least 2 tuning-train inliers after the validation split: \
             n={n}, val={n_val}"
        )));
    }

    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(stage_seed, "tune-split"));
    let mut val_idx: Vec<usize> = idx[..n_val].to_vec();
    let mut tr_idx: Vec<usize> = idx[n_val..].to_vec();
    val_idx.sort_unstable();
    tr_idx.sort_unstable();
    let pos_tr = positives.select(Axis(0), &tr_idx);
    let pos_val = positives.select(Axis(0), &val_idx);

    let syn = negatives_for(n, rng::derive_seed(stage_seed, "tune-negatives"))?;
    let neg_tr = syn.samples.slice(ndarray::s![..tr_idx.len(), ..]).to_owned();
    let neg_val = syn.samples.slice(ndarray::s![tr_idx.len().., ..]).to_owned();

    let mut best: Option<(f64, f64, f64)> = None; // (auc, gamma, c)
    for (ci, (gamma, c)) in CANDIDATES
        .iter()
        .flat_map(|&g| CANDIDATES.iter().map(move |&c| (g, c)))
        .enumerate()
    {
        let mut params = base;
        params.gamma = gamma;
        params.c = c;
        let clf = fit_classifier(
            &crate::classify::ClassifierSpec::Svm(params),
            &pos_tr,
            Some(&neg_tr),
            rng::derive_seed_indexed(stage_seed, "tune", ci as u64),
        )?;
        if !clf.converged() {
            continue;
        }
        let mut scores = clf.decision_scores(&pos_val);
        scores.extend(clf.decision_scores(&neg_val));
        let mut labels = vec![true; pos_val.nrows()];
        labels.extend(std::iter::repeat(false).take(neg_val.nrows()));
        let auc = crate::metrics::roc_auc(&scores, &labels)?;
        if best.map_or(true, |(b, _, _)| auc > b) {
            best = Some((auc, gamma, c));
        }
    }
    best.map(|(_, g, c)| (g, c)).ok_or_else(|| {
        Error::numeric("svm.tune: no (gamma, C) candidate converged on the validation split")
    })
}

/// Score a test mix of held-out inliers and true outliers.
pub fn evaluate_stage(
    stage_model: &HierarchyModel,
    classifier: &TrainedClassifier,
    test_inliers: &FeatureGroup,
    test_outliers: &FeatureGroup,
) -> Result<FoldMetrics> {
    let reps_in = stage_model.represent(test_inliers)?;
    let reps_out = stage_model.represent(test_outliers)?;
    let mut scores = classifier.decision_scores(&reps_in);
    scores.extend(classifier.decision_scores(&reps_out));
    let mut labels = vec![true; reps_in.nrows()];
    labels.extend(std::iter::repeat(false).take(reps_out.nrows()));
    FoldMetrics::from_scores(&scores, &labels)
}

/// Draw the outlier test indices for one fold: `pct`% of the evaluation set,
/// sampled without replacement from the pool.
pub(crate) fn draw_outliers(
    n_test_inliers: usize,
    pool: usize,
    pct: f64,
    master: u64,
    fold: usize,
) -> Result<Vec<usize>> {
    let need = outlier_count_for_pct(n_test_inliers, pct)?;
    if need == 0 {
        return Err(Error::config(format!(
            "test split of {n_test_inliers} inliers rounds to zero outliers at {pct}%; \
             use more data or a larger percentage"
        )));
    }
    if need > pool {
        return Err(Error::data(format!(
            "outlier pool too small: need {need} outliers for {n_test_inliers} test inliers \
             at {pct}%, pool has {pool}"
        )));
    }
    let mut r = rng::stream_indexed(master, "outlier-mix", fold as u64);
    let mut idx = rand::seq::index::sample(&mut r, pool, need).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// The zero-shot audit: training rows come from the inlier pool only, and
/// never overlap the evaluation inliers. Inliers occupy global ids
/// `0..n_in`, outliers `n_in..n_in + n_out`.
fn audit_zero_shot(
    train_idx: &[usize],
    test_in_idx: &[usize],
    outlier_idx: &[usize],
    n_in: usize,
    n_out: usize,
) -> Result<()> {
    let train: std::collections::BTreeSet<usize> = train_idx.iter().copied().collect();
    for &i in train_idx {
        if i >= n_in {
            return Err(Error::numeric(format!(
                "zero-shot audit failed: training id {i} is outside the inlier pool (0..{n_in})"
            )));
        }
    }
    for &i in test_in_idx {
        if train.contains(&i) {
            return Err(Error::numeric(format!(
                "zero-shot audit failed: inlier {i} appears in both train and test"
            )));
        }
    }
    for &j in outlier_idx {
        let gid = n_in + j;
        if j >= n_out {
            return Err(Error::numeric(format!(
                "zero-shot audit failed: outlier index {j} outside pool (0..{n_out})"
            )));
        }
        if train.contains(&gid) {
            return Err(Error::numeric(format!(
                "zero-shot audit failed: outlier global id {gid} reached training"
            )));
        }
    }
    Ok(())
}

/// Everything needed to reproduce and attribute one run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunManifest {
    /// Canonical configuration text.
    pub config_text: String,
    pub config_fingerprint: u64,
    pub dataset_spec: String,
    pub dataset_fingerprint: u64,
    pub master_seed: u64,
    /// Stage seed per fold, in fold order.
    pub fold_seeds: Vec<u64>,
    pub folds: usize,
    /// Crate version plus model-file format version.
    pub artifact_version: String,
    pub wall_clock_secs: f64,
    /// True when every fold passed the train/outlier disjointness check.
    pub zero_shot_audit: bool,
    pub report: EvalReport,
}

pub fn artifact_version() -> String {
    format!(
        "outsynth {} / model format {}.{}",
        env!("CARGO_PKG_VERSION"),
        crate::data::FORMAT_MAJOR,
        crate::data::FORMAT_MINOR
    )
}

/// The fold index sets and per-fold stage seeds for a configuration.
/// `folds == 1` is the holdout protocol and shares the `fit` stage seed,
/// because it is the same computation `fit` + `eval` perform through a
/// model file.
pub(crate) fn fold_plan(
    cfg: &PipelineConfig,
    n_in: usize,
) -> Result<(Vec<(Vec<usize>, Vec<usize>)>, Vec<u64>)> {
    let fold_sets: Vec<(Vec<usize>, Vec<usize>)> = if cfg.folds == 1 {
        let (train, test) = holdout_indices(n_in, cfg.split.test, cfg.seed)?;
        vec![(train, test)]
    } else {
        let folds = kfold_indices(n_in, cfg.folds, rng::derive_seed(cfg.seed, "folds"))?;
        folds
            .iter()
            .map(|test| {
                let test_set: std::collections::BTreeSet<usize> = test.iter().copied().collect();
                let train: Vec<usize> = (0..n_in).filter(|i| !test_set.contains(i)).collect();
                let mut test = test.clone();
                test.sort_unstable();
                (train, test)
            })
            .collect()
    };
    let fold_seeds: Vec<u64> = if cfg.folds == 1 {
        vec![rng::derive_seed(cfg.seed, "fit")]
    } else {
        (0..fold_sets.len())
            .map(|f| rng::derive_seed_indexed(cfg.seed, "fold", f as u64))
            .collect()
    };
    Ok((fold_sets, fold_seeds))
}

/// Fit every fold once and evaluate it at each outlier percentage.
/// Indexed `[pct][fold]`.
fn run_folds(
    cfg: &PipelineConfig,
    dataset: &Dataset,
    pcts: &[f64],
) -> Result<(Vec<Vec<FoldMetrics>>, Vec<u64>)> {
    let features_in = features_of(cfg, dataset, true)?;
    let features_out = features_of(cfg, dataset, false)?;
    let n_in = dataset.n_inliers();
    let n_out = dataset.n_outliers();
    let (fold_sets, fold_seeds) = fold_plan(cfg, n_in)?;

    // [fold][pct], transposed below.
    let per_fold: Vec<Vec<FoldMetrics>> = fold_sets
        .par_iter()
        .enumerate()
        .map(|(f, (train_idx, test_idx))| -> Result<Vec<FoldMetrics>> {
            // Draw and audit every mix before the expensive training.
            let draws: Vec<Vec<usize>> = pcts
                .iter()
                .map(|&pct| {
                    let idx = draw_outliers(test_idx.len(), n_out, pct, cfg.seed, f)?;
                    audit_zero_shot(train_idx, test_idx, &idx, n_in, n_out)?;
                    Ok(idx)
                })
                .collect::<Result<_>>()?;
            let stage = fit_stage(cfg, &slice_rows(&features_in, train_idx), fold_seeds[f])?;
            let test_in = slice_rows(&features_in, test_idx);
            draws
                .iter()
                .map(|outlier_idx| {
                    evaluate_stage(
                        &stage.model,
                        &stage.classifier,
                        &test_in,
                        &slice_rows(&features_out, outlier_idx),
                    )
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let folds = per_fold.len();
    let by_pct: Vec<Vec<FoldMetrics>> = (0..pcts.len())
        .map(|p| (0..folds).map(|f| per_fold[f][p].clone()).collect())
        .collect();
    Ok((by_pct, fold_seeds))
}

/// Run the k-fold cross-validation experiment (`folds >= 2`), or the
/// holdout protocol when `folds == 1`. Training folds contain inliers only;
/// each evaluation fold mixes the held-out inliers with true outliers at the
/// configured percentage.
pub fn run_experiment(cfg: &PipelineConfig, dataset: &Dataset) -> Result<(EvalReport, RunManifest)> {
    cfg.validate()?;
    let started = std::time::Instant::now();
    let (mut by_pct, fold_seeds) = run_folds(cfg, dataset, &[cfg.outlier_pct])?;
    let folds = fold_seeds.len();
    let report = EvalReport::from_folds(by_pct.remove(0), cfg.fingerprint())?;
    let manifest = RunManifest {
        config_text: cfg.to_text(),
        config_fingerprint: cfg.fingerprint(),
        dataset_spec: dataset.source.clone(),
        dataset_fingerprint: dataset.fingerprint,
        master_seed: cfg.seed,
        fold_seeds,
        folds,
        artifact_version: artifact_version(),
        wall_clock_secs: started.elapsed().as_secs_f64(),
        zero_shot_audit: true,
        report: report.clone(),
    };
    Ok((report, manifest))
}

/// Evaluate the same trained folds at several outlier percentages, one
/// report per percentage. Training never depends on the mix and each
/// (fold, percentage) draw starts from a fresh named substream, so entry
/// `i` is identical to `run_experiment` with `outlier_pct = pcts[i]` —
/// the folds are just not refitted per percentage.
pub fn run_experiment_mixes(
    cfg: &PipelineConfig,
    dataset: &Dataset,
    pcts: &[f64],
) -> Result<Vec<EvalReport>> {
    cfg.validate()?;
    if pcts.is_empty() {
        return Err(Error::config("no outlier percentages given"));
    }
    for &p in pcts {
        if !(p > 0.0 && p < 100.0) {
            return Err(Error::config(format!(
                "outlier percentage must be in (0, 100), got {p}"
            )));
        }
    }
    let (by_pct, _) = run_folds(cfg, dataset, pcts)?;
    by_pct
        .into_iter()
        .map(|folds| EvalReport::from_folds(folds, cfg.fingerprint()))
        .collect()
}

/// Deterministic holdout split of `0..n`: shuffle with the `holdout` stream,
/// reserve `round(n * test_frac)` (at least 1) for testing, sort both sides.
pub fn holdout_indices(n: usize, test_frac: f64, master: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_frac > 0.0 && test_frac < 1.0) {
        return Err(Error::config(format!(
            "split.test must be in (0, 1), got {test_frac}"
        )));
    }
    let n_test = ((n as f64 * test_frac).round() as usize).max(1);
    if n_test + 2 > n {
        return Err(Error::data(format!(
            "holdout split needs at least 2 training inliers: n={n}, test={n_test}"
        )));
    }
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(master, "holdout"));
    let mut test: Vec<usize> = idx[..n_test].to_vec();
    let mut train: Vec<usize> = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Train on the holdout-train portion of the inliers and package the result
/// for persistence. The `fit` substream scopes the stage so a later
/// `run_experiment` with different fold counts cannot disturb it.
pub fn fit_model(cfg: &PipelineConfig, dataset: &Dataset) -> Result<ModelFile> {
    cfg.validate()?;
    let features_in = features_of(cfg, dataset, true)?;
    let n_in = dataset.n_inliers();
    let (train_idx, _) = holdout_indices(n_in, cfg.split.test, cfg.seed)?;
    let stage = fit_stage(
        cfg,
        &slice_rows(&features_in, &train_idx),
        rng::derive_seed(cfg.seed, "fit"),
    )?;
    Ok(ModelFile {
        config_text: cfg.to_text(),
        spec: cfg.hierarchy_spec(),
        feature_dims: stage.feature_dims,
        unit_interval: stage.unit_interval,
        model: stage.model,
        catalog: stage.catalog,
        classifier: stage.classifier,
    })
}

/// Evaluate a fitted model on the held-out inliers (recomputed from the
/// stored config) mixed with true outliers. `pct_override` replaces the
/// stored outlier percentage when given.
pub fn eval_model(
    file: &ModelFile,
    dataset: &Dataset,
    pct_override: Option<f64>,
) -> Result<(EvalReport, RunManifest)> {
    let started = std::time::Instant::now();
    let mut cfg = PipelineConfig::from_text(&file.config_text)?;
    if let Some(pct) = pct_override {
        cfg.outlier_pct = pct;
    }
    cfg.validate()?;
    let features_in = features_of(&cfg, dataset, true)?;
    let features_out = features_of(&cfg, dataset, false)?;
    let dims: Vec<usize> = features_in.iter().map(|m| m.ncols()).collect();
    if dims != file.feature_dims {
        return Err(Error::data(format!(
            "model was trained on feature dims {:?} but this dataset yields {:?}",
            file.feature_dims, dims
        )));
    }
    let n_in = dataset.n_inliers();
    let n_out = dataset.n_outliers();
    let (train_idx, test_idx) = holdout_indices(n_in, cfg.split.test, cfg.seed)?;
    let outlier_idx = draw_outliers(test_idx.len(), n_out, cfg.outlier_pct, cfg.seed, 0)?;
    audit_zero_shot(&train_idx, &test_idx, &outlier_idx, n_in, n_out)?;
    let metrics = evaluate_stage(
        &file.model,
        &file.classifier,
        &slice_rows(&features_in, &test_idx),
        &slice_rows(&features_out, &outlier_idx),
    )?;
    let report = EvalReport::from_folds(vec![metrics], cfg.fingerprint())?;
    let manifest = RunManifest {
        config_text: cfg.to_text(),
        config_fingerprint: cfg.fingerprint(),
        dataset_spec: dataset.source.clone(),
        dataset_fingerprint: dataset.fingerprint,
        master_seed: cfg.seed,
        fold_seeds: vec![rng::derive_seed(cfg.seed, "fit")],
        folds: 1,
        artifact_version: artifact_version(),
        wall_clock_secs: started.elapsed().as_secs_f64(),
        zero_shot_audit: true,
        report: report.clone(),
    };
    Ok((report, manifest))
}

/// Fit on the full inlier set and export the distribution catalog and the
/// synthesized negatives as plot-ready CSV matrices.
///
/// * `q.csv`: per training inlier, `mu_*`, `sigma_*`, and an `outskirt`
///   0/1 flag (all ones when no selector is configured).
/// * `synth.csv`: per synthetic negative, the source catalog index and
///   `y_*`.
pub fn synth_export(
    cfg: &PipelineConfig,
    dataset: &Dataset,
    out_dir: &std::path::Path,
) -> Result<()> {
    cfg.validate()?;
    if cfg.synthesis == SynthesisMode::None {
        return Err(Error::config(
            "synth-export needs a synthesis mode (stochastic, deterministic, or jitter)",
        ));
    }
    let features_in = features_of(cfg, dataset, true)?;
    let stage = fit_stage(cfg, &features_in, rng::derive_seed(cfg.seed, "fit"))?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    // Q: means and sigmas when the catalog exists, otherwise the codes.
    let (mu, sigma) = match &stage.catalog {
        Some(cat) => (cat.mu.clone(), Some(&cat.sigma)),
        None => (stage.positives.clone(), None),
    };
    let d = mu.ncols();
    let mut header: Vec<String> = (0..d).map(|i| format!("mu_{i}")).collect();
    let mut width = d + 1;
    if sigma.is_some() {
        header.extend((0..d).map(|i| format!("sigma_{i}")));
        width += d;
    }
    header.push("outskirt".into());
    let mut q = Array2::zeros((mu.nrows(), width));
    let member: std::collections::BTreeSet<usize> = match &stage.outskirts {
        Some(set) => set.indices.iter().copied().collect(),
        None => (0..mu.nrows()).collect(),
    };
    for i in 0..mu.nrows() {
        for j in 0..d {
            q[[i, j]] = mu[[i, j]];
            if let Some(s) = sigma {
                q[[i, d + j]] = s[[i, j]];
            }
        }
        q[[i, width - 1]] = if member.contains(&i) { 1.0 } else { 0.0 };
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    crate::data::write_csv_matrix(out_dir.join("q.csv"), &header_refs, &q)?;

    let syn = stage
        .synthesis
        .as_ref()
        .expect("synthesis mode checked above");
    let dy = syn.samples.ncols();
    let mut header: Vec<String> = vec!["source".into()];
    header.extend((0..dy).map(|i| format!("y_{i}")));
    let mut y = Array2::zeros((syn.samples.nrows(), dy + 1));
    for i in 0..syn.samples.nrows() {
        y[[i, 0]] = syn.sources[i] as f64;
        for j in 0..dy {
            y[[i, j + 1]] = syn.samples[[i, j]];
        }
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    crate::data::write_csv_matrix(out_dir.join("synth.csv"), &header_refs, &y)?;
    Ok(())
}

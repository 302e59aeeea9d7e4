//! The (α, β) hyperparameter surface: per fold the hierarchy is fitted
//! once, then every grid cell reuses its catalog for selection, synthesis,
//! classification, and scoring. Cell failures (an empty outskirt set at
//! large α, a non-converging classifier) mark the cell NaN with a reason
//! instead of aborting the surface.

use ndarray::Array2;
use rayon::prelude::*;

use crate::boundary::{meta_stats, select_outskirts, synthesize, EpsMode, SynthesisConfig};
use crate::classify::fit_classifier;
use crate::error::{Error, Result};
use crate::hierarchy::{fit_hierarchy, FusionKind};
use crate::pipeline::config::{PipelineConfig, SynthesisMode};
use crate::pipeline::dataset::Dataset;
use crate::pipeline::run::{evaluate_stage, features_of, slice_rows};
use crate::rng;

/// Grid axes. Defaults reproduce the published surface layout:
/// α over 1..2 in steps of 0.25, β over 1..5 in steps of 0.5.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            alphas: (0..5).map(|i| 1.0 + 0.25 * i as f64).collect(),
            betas: (0..9).map(|i| 1.0 + 0.5 * i as f64).collect(),
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.betas.is_empty() {
            return Err(Error::config("grid axes must be non-empty"));
        }
        for &a in self.alphas.iter().chain(&self.betas) {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::config(format!(
                    "grid values must be finite and > 0, got {a}"
                )));
            }
        }
        Ok(())
    }

    /// Cells in row-major order: α outer, β inner.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.alphas
            .iter()
            .flat_map(|&a| self.betas.iter().map(move |&b| (a, b)))
            .collect()
    }
}

/// One grid cell, averaged over folds. `auc`/`f1` are NaN when any fold
/// failed; `reason` then explains the first failure.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub alpha: f64,
    pub beta: f64,
    pub auc: f64,
    pub f1: f64,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    pub cells: Vec<GridCell>,
    pub folds: usize,
}

impl GridTable {
    /// Plot-ready CSV in row-major (α outer, β inner) order. Failed cells
    /// carry `NaN` metrics and a reason (with separators stripped so the
    /// table stays rectangular).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,auc,f1,reason\n");
        for c in &self.cells {
            let reason = c
                .reason
                .as_deref()
                .unwrap_or("")
                .replace([',', '\n'], ";");
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.alpha, c.beta, c.auc, c.f1, reason
            ));
        }
        out
    }
}

/// Per-fold, per-cell outcome before merging.
type CellOutcome = std::result::Result<(f64, f64), String>;

pub fn grid_search_alpha_beta(
    cfg: &PipelineConfig,
    dataset: &Dataset,
    grid: &GridSpec,
) -> Result<GridTable> {
    cfg.validate()?;
    grid.validate()?;
    if cfg.fusion != FusionKind::Vae {
        return Err(Error::config("grid search needs fusion=vae (the catalog provides α and β their meaning)"));
    }
    let rule = cfg.selector.ok_or_else(|| {
        Error::config("grid search varies alpha; configure selector=l2 or selector=ellipsoid")
    })?;
    let noise = match cfg.synthesis {
        SynthesisMode::Stochastic => EpsMode::HalfNormal,
        SynthesisMode::Deterministic => EpsMode::Deterministic,
        other => {
            return Err(Error::config(format!(
                "grid search varies beta; synthesis must be stochastic or deterministic, got {other}"
            )))
        }
    };

    let features_in = features_of(cfg, dataset, true)?;
    let features_out = features_of(cfg, dataset, false)?;
    let n_in = dataset.n_inliers();
    let n_out = dataset.n_outliers();
    let (fold_sets, fold_seeds) = super::run::fold_plan(cfg, n_in)?;
    let cells = grid.cells();

    let per_fold: Vec<Vec<CellOutcome>> = fold_sets
        .par_iter()
        .enumerate()
        .map(|(f, (train_idx, test_idx))| -> Result<Vec<CellOutcome>> {
            let fold_seed = fold_seeds[f];
            let train = slice_rows(&features_in, train_idx);
            let fit = fit_hierarchy(&train, &cfg.hierarchy_spec(), fold_seed)?;
            let catalog = fit
                .catalog
                .as_ref()
                .expect("fusion=vae was checked; a catalog exists");
            let stats = meta_stats(catalog)?;
            let positives = fit.model.represent(&train)?;
            let outlier_idx =
                super::run::draw_outliers(test_idx.len(), n_out, cfg.outlier_pct, cfg.seed, f)?;
            let test_in = slice_rows(&features_in, test_idx);
            let test_out = slice_rows(&features_out, &outlier_idx);

            let outcomes = cells
                .iter()
                .enumerate()
                .map(|(ci, &(alpha, beta))| -> CellOutcome {
                    let set = select_outskirts(catalog, &stats, rule, alpha)
                        .map_err(|e| e.to_string())?;
                    let syn = synthesize(
                        catalog,
                        &set,
                        &SynthesisConfig {
                            beta,
                            noise,
                            count: train_idx.len(),
                            seed: rng::derive_seed_indexed(fold_seed, "synthesis", ci as u64),
                        },
                    )
                    .map_err(|e| e.to_string())?;
                    let classifier = fit_classifier(
                        &cfg.classifier_spec(),
                        &positives,
                        Some(&syn.samples),
                        rng::derive_seed_indexed(fold_seed, "svm", ci as u64),
                    )
                    .map_err(|e| e.to_string())?;
                    if !classifier.converged() {
                        return Err("classifier did not converge".into());
                    }
                    let m = evaluate_stage(&fit.model, &classifier, &test_in, &test_out)
                        .map_err(|e| e.to_string())?;
                    Ok((m.auc, m.f1))
                })
                .collect();
            Ok(outcomes)
        })
        .collect::<Result<_>>()?;

    let folds = per_fold.len();
    let merged: Vec<GridCell> = cells
        .iter()
        .enumerate()
        .map(|(ci, &(alpha, beta))| {
            let mut auc_sum = 0.0;
            let mut f1_sum = 0.0;
            let mut reason = None;
            for fold in &per_fold {
                match &fold[ci] {
                    Ok((auc, f1)) => {
                        auc_sum += auc;
                        f1_sum += f1;
                    }
                    Err(why) => {
                        if reason.is_none() {
                            reason = Some(why.clone());
                        }
                    }
                }
            }
            if let Some(reason) = reason {
                GridCell {
                    alpha,
                    beta,
                    auc: f64::NAN,
                    f1: f64::NAN,
                    reason: Some(reason),
                }
            } else {
                GridCell {
                    alpha,
                    beta,
                    auc: auc_sum / folds as f64,
                    f1: f1_sum / folds as f64,
                    reason: None,
                }
            }
        })
        .collect();

    Ok(GridTable {
        cells: merged,
        folds,
    })
}

/// Lightweight helper for tests and diagnostics: outskirt set size at a
/// given α on the training portion of the first fold.
pub fn outskirt_count_at(
    cfg: &PipelineConfig,
    train: &[Array2<f64>],
    alpha: f64,
    seed: u64,
) -> Result<usize> {
    let rule = cfg
        .selector
        .ok_or_else(|| Error::config("no selector configured"))?;
    let fit = fit_hierarchy(train, &cfg.hierarchy_spec(), seed)?;
    let catalog = fit
        .catalog
        .ok_or_else(|| Error::config("outskirt counting needs fusion=vae"))?;
    let stats = meta_stats(&catalog)?;
    Ok(select_outskirts(&catalog, &stats, rule, alpha)?.indices.len())
}

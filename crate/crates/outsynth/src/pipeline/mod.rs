//! End-to-end experiment orchestration: configuration, dataset loading,
//! cross-validated runs, hyperparameter grids, and ablation tables.

pub mod ablate;
pub mod config;
pub mod dataset;
pub mod grid;
pub mod run;

pub use ablate::{ablation_table, ablation_variants, AblationRow, AblationTable};
pub use config::{AeMode, ClassifierKind, PipelineConfig, SplitSpec, SynthesisMode};
pub use dataset::{load_dataset, Dataset, DatasetKind};
pub use grid::{grid_search_alpha_beta, GridCell, GridSpec, GridTable};
pub use run::{
    artifact_version, eval_model, evaluate_stage, features_of, fit_model, fit_stage,
    holdout_indices, run_experiment, run_experiment_mixes, slice_rows, synth_export,
    FeatureGroup, FittedStage, RunManifest,
};

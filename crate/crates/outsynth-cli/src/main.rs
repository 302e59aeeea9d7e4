//! Command-line interface for the outsynth pipeline.
//!
//! Every command is deterministic given (config, dataset, seed): worker
//! counts only change scheduling, never results. Exit codes: 0 success,
//! 2 configuration error, 3 data/I-O error, 4 numeric failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use outsynth::boundary::SelectorRule;
use outsynth::data::{inspect_bytes, load_model, save_model};
use outsynth::error::{Error, Result};
use outsynth::metrics::EvalReport;
use outsynth::pipeline::{
    ablation_table, grid_search_alpha_beta, load_dataset, run_experiment, synth_export,
    Dataset, DatasetKind, GridSpec, PipelineConfig, RunManifest,
};

#[derive(Parser)]
#[command(
    name = "outsynth",
    version,
    about = "Zero-shot anomaly detection: synthesize outliers around the inlier distribution, \
             then train a binary classifier on them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every experiment command. CLI flags override the
/// corresponding configuration keys.
#[derive(Args, Debug)]
struct CommonOpts {
    /// Flat key=value configuration file (unknown keys are errors).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset spec: `blobs:n_in=..,n_out=..,dim=..,sep=..,seed=..`,
    /// `mnist:dir=..,inlier=..`, `csv:inliers=..,outliers=..`, or
    /// `pgm:inliers=..,outliers=..`.
    #[arg(long)]
    dataset: Option<String>,
    /// Master seed (overrides the `seed` key).
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for reports, manifests, and artifacts.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Rayon worker threads (default: one per core). Results are identical
    /// for any worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Outskirt selection threshold (overrides `alpha`).
    #[arg(long)]
    alpha: Option<f64>,
    /// Synthesis magnitude (overrides `beta`).
    #[arg(long)]
    beta: Option<f64>,
    /// Outskirt rule: l2, ellipsoid, or none (overrides `selector`).
    #[arg(long)]
    selector: Option<String>,
    /// Outliers as a percentage of each evaluation set (overrides
    /// `outlier_pct`).
    #[arg(long)]
    outlier_pct: Option<f64>,
    /// Cross-validation folds; 1 = holdout protocol (overrides `folds`).
    #[arg(long)]
    folds: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the full stage on the holdout-train inliers and save it.
    Fit {
        #[command(flatten)]
        common: CommonOpts,
        /// Output model path (default: <out-dir>/model.bin).
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Evaluate: either a saved model on its holdout split, or a config
    /// end to end (k-fold cross-validation, in-process).
    Eval {
        #[command(flatten)]
        common: CommonOpts,
        /// Saved model to evaluate. Without this, the config is fitted and
        /// evaluated in process.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Sweep the (alpha, beta) surface; cells that fail are marked NaN
    /// with a reason.
    Gridsearch {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated alpha axis (default: 1,1.25,1.5,1.75,2).
        #[arg(long)]
        alphas: Option<String>,
        /// Comma-separated beta axis (default: 1,1.5,2,...,5).
        #[arg(long)]
        betas: Option<String>,
    },
    /// Run the canonical pipeline variants side by side.
    Ablate {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fit on all inliers and export the distribution catalog plus the
    /// synthesized negatives as plot-ready CSVs.
    SynthExport {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Materialize a `blobs:` dataset spec as inliers.csv / outliers.csv.
    MakeBlobs {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print a saved model's format, sections, dims, and configuration.
    InspectModel {
        /// Saved model path.
        #[arg(long)]
        model: PathBuf,
    },
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { common, model_out } => {
            let (cfg, ds) = setup(&common)?;
            let path = model_out.unwrap_or_else(|| common.out_dir.join("model.bin"));
            let file = outsynth::pipeline::fit_model(&cfg, &ds)?;
            ensure_dir(path.parent().unwrap_or(Path::new(".")))?;
            save_model(&path, &file)?;
            println!("fitted {}", outsynth::pipeline::artifact_version());
            println!("model: {}", path.display());
            println!("feature dims: {:?}", file.feature_dims);
            if let Some(cat) = &file.catalog {
                println!("catalog: {} distributions of dim {}", cat.len(), cat.mu.ncols());
            }
            Ok(())
        }
        Command::Eval { common, model } => {
            let (report, manifest) = match model {
                Some(path) => {
                    reject_model_overrides(&common)?;
                    let file = load_model(&path)?;
                    let ds = dataset_of(&common)?;
                    apply_workers(common.workers)?;
                    outsynth::pipeline::eval_model(&file, &ds, common.outlier_pct)?
                }
                None => {
                    let (cfg, ds) = setup(&common)?;
                    run_experiment(&cfg, &ds)?
                }
            };
            write_report(&common.out_dir, &report, &manifest)?;
            print_report(&report);
            Ok(())
        }
        Command::Gridsearch {
            common,
            alphas,
            betas,
        } => {
            let (cfg, ds) = setup(&common)?;
            let mut grid = GridSpec::default();
            if let Some(list) = alphas {
                grid.alphas = parse_axis("alphas", &list)?;
            }
            if let Some(list) = betas {
                grid.betas = parse_axis("betas", &list)?;
            }
            let table = grid_search_alpha_beta(&cfg, &ds, &grid)?;
            ensure_dir(&common.out_dir)?;
            let path = common.out_dir.join("grid.csv");
            write_text(&path, &table.to_csv())?;
            println!("grid: {} cells over {} folds -> {}", table.cells.len(), table.folds, path.display());
            let best = table
                .cells
                .iter()
                .filter(|c| c.auc.is_finite())
                .max_by(|a, b| a.auc.total_cmp(&b.auc));
            match best {
                Some(c) => println!("best: alpha={} beta={} auc={:.4} f1={:.4}", c.alpha, c.beta, c.auc, c.f1),
                None => println!("best: none (every cell failed)"),
            }
            Ok(())
        }
        Command::Ablate { common } => {
            let (cfg, ds) = setup(&common)?;
            let table = ablation_table(&cfg, &ds)?;
            ensure_dir(&common.out_dir)?;
            let path = common.out_dir.join("ablation.csv");
            write_text(&path, &table.to_csv())?;
            println!("ablation: {} rows over {} folds -> {}", table.rows.len(), table.folds, path.display());
            for r in &table.rows {
                match &r.reason {
                    None => println!("  {:<24} auc={:.4} f1={:.4}", r.name, r.auc, r.f1),
                    Some(why) => println!("  {:<24} failed: {why}", r.name),
                }
            }
            Ok(())
        }
        Command::SynthExport { common } => {
            let (cfg, ds) = setup(&common)?;
            synth_export(&cfg, &ds, &common.out_dir)?;
            println!(
                "wrote {} and {}",
                common.out_dir.join("q.csv").display(),
                common.out_dir.join("synth.csv").display()
            );
            Ok(())
        }
        Command::MakeBlobs { common } => {
            let spec = common
                .dataset
                .as_deref()
                .ok_or_else(|| Error::config("make-blobs needs --dataset blobs:..."))?;
            if !spec.starts_with("blobs:") {
                return Err(Error::config(format!(
                    "make-blobs materializes synthetic data and needs a blobs: spec, got '{spec}'"
                )));
            }
            let ds = load_dataset(spec)?;
            let DatasetKind::Vectors { inliers, outliers } = &ds.kind else {
                return Err(Error::data("blobs specs always load as vectors"));
            };
            ensure_dir(&common.out_dir)?;
            let names: Vec<String> = (0..inliers.ncols()).map(|i| format!("x_{i}")).collect();
            let header: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let in_path = common.out_dir.join("inliers.csv");
            let out_path = common.out_dir.join("outliers.csv");
            outsynth::data::write_csv_matrix(&in_path, &header, inliers)?;
            outsynth::data::write_csv_matrix(&out_path, &header, outliers)?;
            println!(
                "wrote {} ({} rows) and {} ({} rows)",
                in_path.display(),
                inliers.nrows(),
                out_path.display(),
                outliers.nrows()
            );
            Ok(())
        }
        Command::InspectModel { model } => {
            let bytes = std::fs::read(&model).map_err(|e| Error::io(&model, e))?;
            let (major, minor, sections) = inspect_bytes(&bytes)?;
            let file = outsynth::data::model_from_bytes(&bytes)?;
            println!("model: {}", model.display());
            println!("format: {major}.{minor} ({} bytes, checksum ok)", bytes.len());
            for s in &sections {
                println!("  section {} at {:>8}: {:>8} bytes", s.tag, s.offset, s.len);
            }
            println!("feature dims: {:?}", file.feature_dims);
            println!("classifier: {}", file.classifier.name());
            match &file.catalog {
                Some(cat) => println!(
                    "catalog: {} distributions of dim {}",
                    cat.len(),
                    cat.mu.ncols()
                ),
                None => println!("catalog: none (non-variational fusion)"),
            }
            println!("--- config ---");
            print!("{}", file.config_text);
            Ok(())
        }
    }
}

/// Resolve config + dataset + worker pool for an experiment command.
fn setup(common: &CommonOpts) -> Result<(PipelineConfig, Dataset)> {
    let cfg = config_of(common)?;
    let ds = dataset_of(common)?;
    apply_workers(common.workers)?;
    Ok((cfg, ds))
}

fn config_of(common: &CommonOpts) -> Result<PipelineConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            PipelineConfig::from_text(&text)?
        }
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(alpha) = common.alpha {
        cfg.alpha = alpha;
    }
    if let Some(beta) = common.beta {
        cfg.beta = beta;
    }
    if let Some(sel) = &common.selector {
        cfg.selector = match sel.as_str() {
            "none" => None,
            other => Some(other.parse::<SelectorRule>()?),
        };
    }
    if let Some(pct) = common.outlier_pct {
        cfg.outlier_pct = pct;
    }
    if let Some(folds) = common.folds {
        cfg.folds = folds;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dataset_of(common: &CommonOpts) -> Result<Dataset> {
    let spec = common
        .dataset
        .as_deref()
        .ok_or_else(|| Error::config("missing --dataset (e.g. --dataset blobs:n_in=200,n_out=200,dim=2,sep=10,seed=7)"))?;
    load_dataset(spec)
}

/// A saved model pins its whole configuration; only the evaluation mix may
/// change. Anything else silently evaluating a different experiment than
/// was fitted would be misleading, so it is rejected.
fn reject_model_overrides(common: &CommonOpts) -> Result<()> {
    if common.config.is_some()
        || common.seed.is_some()
        || common.alpha.is_some()
        || common.beta.is_some()
        || common.selector.is_some()
        || common.folds.is_some()
    {
        return Err(Error::config(
            "eval --model uses the configuration stored in the model file; \
             only --dataset, --outlier-pct, --out-dir, and --workers apply",
        ));
    }
    Ok(())
}

fn apply_workers(workers: Option<usize>) -> Result<()> {
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::config("--workers must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config(format!("worker pool: {e}")))?;
    }
    Ok(())
}

fn parse_axis(name: &str, list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("--{name}: '{s}' is not a number")))
        })
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_report(out_dir: &Path, report: &EvalReport, manifest: &RunManifest) -> Result<()> {
    ensure_dir(out_dir)?;
    write_text(&out_dir.join("report.csv"), &report.to_csv())?;
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::numeric(format!("manifest serialization: {e}")))?;
    write_text(&out_dir.join("manifest.json"), &json)?;
    Ok(())
}

fn print_report(report: &EvalReport) {
    println!(
        "auc={:.6} f1={:.6} tpr={:.6} fpr={:.6} (folds={}, {} inliers / {} outliers evaluated)",
        report.auc,
        report.f1,
        report.tpr,
        report.fpr,
        report.per_fold.len(),
        report.n_pos,
        report.n_neg
    );
    for (i, m) in report.per_fold.iter().enumerate() {
        println!("  fold {i}: auc={:.6} f1={:.6}", m.auc, m.f1);
    }
}

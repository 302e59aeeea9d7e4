//! Experiment configuration: a flat `key=value` text format with dotted
//! keys, a canonical renderer, and the cross-stage invariants.
//!
//! The canonical text (`to_text`) lists every key exactly once in a fixed
//! order, so `fingerprint()` identifies a configuration and equal configs
//! produce byte-identical artifacts. Parsing unknown keys is an error — a
//! typo must never silently fall back to a default.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::boundary::SelectorRule;
use crate::classify::{
    ClassifierSpec, Kernel, MlpParams, NbParams, OneClassParams, SvmParams,
};
use crate::error::{Error, Result};
use crate::features::{FeatureKind, HogParams, LbpMethod, LbpParams};
use crate::hierarchy::{AeSpec, FusionKind, HierarchySpec, ReconLoss, VaeSpec, WidthRule};
use crate::nnet::{Activation, Optimizer};
use crate::rng;

/// How the feature autoencoders are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AeMode {
    /// One denoising AE per descriptor (the full pipeline).
    Individual,
    /// All descriptors concatenated into a single AE.
    Concatenated,
    /// No distillation: raw descriptors feed the fusion stage directly.
    None,
}

impl std::fmt::Display for AeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AeMode::Individual => "individual",
            AeMode::Concatenated => "concatenated",
            AeMode::None => "none",
        })
    }
}

impl std::str::FromStr for AeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "individual" => Ok(AeMode::Individual),
            "concatenated" => Ok(AeMode::Concatenated),
            "none" => Ok(AeMode::None),
            other => Err(Error::config(format!(
                "unknown ae.mode '{other}' (expected individual|concatenated|none)"
            ))),
        }
    }
}

/// How negative training samples are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthesisMode {
    /// Directional synthesis with half-normal noise (the full pipeline).
    Stochastic,
    /// Directional synthesis with the noise pinned to 1 (one point per
    /// outskirt distribution).
    Deterministic,
    /// Isotropic jitter of autoencoder codes (non-variational baseline).
    Jitter,
    /// No synthesis; requires the one-class classifier.
    None,
}

impl std::fmt::Display for SynthesisMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SynthesisMode::Stochastic => "stochastic",
            SynthesisMode::Deterministic => "deterministic",
            SynthesisMode::Jitter => "jitter",
            SynthesisMode::None => "none",
        })
    }
}

impl std::str::FromStr for SynthesisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stochastic" => Ok(SynthesisMode::Stochastic),
            "deterministic" => Ok(SynthesisMode::Deterministic),
            "jitter" => Ok(SynthesisMode::Jitter),
            "none" => Ok(SynthesisMode::None),
            other => Err(Error::config(format!(
                "unknown synthesis mode '{other}' (expected stochastic|deterministic|jitter|none)"
            ))),
        }
    }
}

/// Which classifier trains on the latent representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Svm,
    Nb,
    Mlp,
    OneClass,
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassifierKind::Svm => "svm",
            ClassifierKind::Nb => "nb",
            ClassifierKind::Mlp => "mlp",
            ClassifierKind::OneClass => "one_class",
        })
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm" => Ok(ClassifierKind::Svm),
            "nb" => Ok(ClassifierKind::Nb),
            "mlp" => Ok(ClassifierKind::Mlp),
            "one_class" => Ok(ClassifierKind::OneClass),
            other => Err(Error::config(format!(
                "unknown classifier '{other}' (expected svm|nb|mlp|one_class)"
            ))),
        }
    }
}

/// Inlier split fractions for hyperparameter tuning (train/val/test).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train: 0.8,
            val: 0.1,
            test: 0.1,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("train", self.train), ("val", self.val), ("test", self.test)] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Error::config(format!(
                    "split.{name} must be in (0, 1), got {v}"
                )));
            }
        }
        let sum = self.train + self.val + self.test;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "split fractions must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// The complete experiment configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PipelineConfig {
    /// Descriptors, canonical order hog < lbp < raw.
    pub features: Vec<String>,
    pub hog: HogParams,
    pub lbp: LbpParams,
    pub ae_mode: AeMode,
    pub ae: AeSpec,
    pub fusion: FusionKind,
    pub vae: VaeSpec,
    pub selector: Option<SelectorRule>,
    pub synthesis: SynthesisMode,
    pub alpha: f64,
    pub beta: f64,
    /// Noise standard deviation for the jitter baseline.
    pub jitter_sigma: f64,
    pub classifier: ClassifierKind,
    pub svm: SvmParams,
    pub svm_degree: i32,
    /// Tune (gamma, C) on a validation split before the final fit.
    pub svm_tune: bool,
    pub nb: NbParams,
    pub mlp_hidden: usize,
    pub mlp_epochs: usize,
    pub mlp_batch_size: usize,
    pub oneclass: OneClassParams,
    pub train_epochs: usize,
    pub train_batch_size: usize,
    pub optimizer_kind: String,
    pub learning_rate: f64,
    pub staged: bool,
    pub folds: usize,
    pub outlier_pct: f64,
    pub split: SplitSpec,
    pub seed: u64,
}

impl Default for PipelineConfig {
    /// The MNIST preset: HoG(9 orientations, 14x14 cells, 1x1 blocks) +
    /// LBP(uniform, 4 points, radius 8) + raw pixels, individual 1-layer
    /// relu AEs, VAE with a 2-dim latent, l2 selector at alpha 3 / beta 5,
    /// SVM with rbf gamma 1 C 0.1, 5-fold CV at 50% outliers.
    fn default() -> Self {
        PipelineConfig {
            features: vec!["hog".into(), "lbp".into(), "raw".into()],
            hog: HogParams::default(),
            lbp: LbpParams::default(),
            ae_mode: AeMode::Individual,
            ae: AeSpec::default(),
            fusion: FusionKind::Vae,
            vae: VaeSpec::default(),
            selector: Some(SelectorRule::L2),
            synthesis: SynthesisMode::Stochastic,
            alpha: 3.0,
            beta: 5.0,
            jitter_sigma: 1.5,
            classifier: ClassifierKind::Svm,
            svm: SvmParams::default(),
            svm_degree: 3,
            svm_tune: false,
            nb: NbParams::default(),
            mlp_hidden: 32,
            mlp_epochs: 100,
            mlp_batch_size: 64,
            oneclass: OneClassParams::default(),
            train_epochs: 50,
            train_batch_size: 128,
            optimizer_kind: "adam".into(),
            learning_rate: 1e-3,
            staged: false,
            folds: 5,
            outlier_pct: 50.0,
            split: SplitSpec::default(),
            seed: 0,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::config(format!("config key '{key}': {e}")))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::config(format!(
            "config key '{key}': cannot parse '{value}' as a number"
        ))
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::config(format!(
            "config key '{key}': expected true|false, got '{other}'"
        ))),
    }
}

impl PipelineConfig {
    /// Parse flat `key=value` text. Blank lines and `#` comments are
    /// skipped; unknown or duplicate keys are errors. Keys not present keep
    /// their defaults.
    pub fn from_text(text: &str) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!(
                    "config line {}: expected key=value, got '{line}'",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            if let Some(prev) = seen.insert(key.to_string(), lineno + 1) {
                return Err(Error::config(format!(
                    "config key '{key}' set twice (lines {prev} and {})",
                    lineno + 1
                )));
            }
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    /// Apply one `key=value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "features" => {
                let mut feats: Vec<String> = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                for f in &feats {
                    if !matches!(f.as_str(), "hog" | "lbp" | "raw") {
                        return Err(Error::config(format!(
                            "unknown feature '{f}' (expected hog|lbp|raw)"
                        )));
                    }
                }
                feats.sort_by_key(|f| match f.as_str() {
                    "hog" => 0,
                    "lbp" => 1,
                    _ => 2,
                });
                feats.dedup();
                if feats.is_empty() {
                    return Err(Error::config("features must name at least one descriptor"));
                }
                self.features = feats;
            }
            "hog.orientations" => self.hog.orientations = parse_num(key, value)?,
            "hog.cell" => {
                let c: usize = parse_num(key, value)?;
                self.hog.cell = (c, c);
            }
            "hog.block" => {
                let b: usize = parse_num(key, value)?;
                self.hog.block = (b, b);
            }
            "lbp.method" => self.lbp.method = parse::<LbpMethod>(key, value)?,
            "lbp.points" => self.lbp.points = parse_num(key, value)?,
            "lbp.radius" => self.lbp.radius = parse_num(key, value)?,
            "ae.mode" => self.ae_mode = parse::<AeMode>(key, value)?,
            "ae.layers" => self.ae.layers = parse_num(key, value)?,
            "ae.width" => self.ae.width = parse::<WidthRule>(key, value)?,
            "ae.activation" => self.ae.activation = parse::<Activation>(key, value)?,
            "ae.loss" => self.ae.loss = parse::<ReconLoss>(key, value)?,
            "ae.noise_sigma" => self.ae.noise_sigma = parse_num(key, value)?,
            "fusion" => self.fusion = parse::<FusionKind>(key, value)?,
            "vae.layers" => self.vae.layers = parse_num(key, value)?,
            "vae.width" => self.vae.width = parse::<WidthRule>(key, value)?,
            "vae.latent_dim" => self.vae.latent_dim = parse_num(key, value)?,
            "selector" => {
                self.selector = if value == "none" {
                    None
                } else {
                    Some(parse::<SelectorRule>(key, value)?)
                };
            }
            "synthesis" => self.synthesis = parse::<SynthesisMode>(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "beta" => self.beta = parse_num(key, value)?,
            "jitter.sigma" => self.jitter_sigma = parse_num(key, value)?,
            "classifier" => self.classifier = parse::<ClassifierKind>(key, value)?,
            "svm.kernel" => {
                self.svm.kernel = parse::<Kernel>(key, value)?;
                if let Kernel::Poly { degree } = &mut self.svm.kernel {
                    *degree = self.svm_degree;
                }
            }
            "svm.degree" => {
                self.svm_degree = parse_num(key, value)?;
                if let Kernel::Poly { degree } = &mut self.svm.kernel {
                    *degree = self.svm_degree;
                }
            }
            "svm.gamma" => self.svm.gamma = parse_num(key, value)?,
            "svm.c" => self.svm.c = parse_num(key, value)?,
            "svm.tol" => self.svm.tol = parse_num(key, value)?,
            "svm.tune" => self.svm_tune = parse_bool(key, value)?,
            "nb.var_floor" => self.nb.var_floor = parse_num(key, value)?,
            "mlp.hidden" => self.mlp_hidden = parse_num(key, value)?,
            "mlp.epochs" => self.mlp_epochs = parse_num(key, value)?,
            "mlp.batch_size" => self.mlp_batch_size = parse_num(key, value)?,
            "oneclass.kernel" => self.oneclass.kernel = parse::<Kernel>(key, value)?,
            "oneclass.gamma" => self.oneclass.gamma = parse_num(key, value)?,
            "oneclass.nu" => self.oneclass.nu = parse_num(key, value)?,
            "train.epochs" => self.train_epochs = parse_num(key, value)?,
            "train.batch_size" => self.train_batch_size = parse_num(key, value)?,
            "train.optimizer" => {
                if !matches!(value, "adam" | "sgd") {
                    return Err(Error::config(format!(
                        "config key '{key}': expected adam|sgd, got '{value}'"
                    )));
                }
                self.optimizer_kind = value.to_string();
            }
            "train.lr" => self.learning_rate = parse_num(key, value)?,
            "train.staged" => self.staged = parse_bool(key, value)?,
            "folds" => self.folds = parse_num(key, value)?,
            "outlier_pct" => self.outlier_pct = parse_num(key, value)?,
            "split.train" => self.split.train = parse_num(key, value)?,
            "split.val" => self.split.val = parse_num(key, value)?,
            "split.test" => self.split.test = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            other => {
                return Err(Error::config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    /// Canonical text: every key, fixed order, parseable by `from_text`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let kv = |s: &mut String, k: &str, v: &dyn std::fmt::Display| {
            writeln!(s, "{k}={v}").expect("string write");
        };
        kv(&mut s, "features", &self.features.join(","));
        kv(&mut s, "hog.orientations", &self.hog.orientations);
        kv(&mut s, "hog.cell", &self.hog.cell.0);
        kv(&mut s, "hog.block", &self.hog.block.0);
        kv(
            &mut s,
            "lbp.method",
            &match self.lbp.method {
                LbpMethod::Uniform => "uniform",
                LbpMethod::Var => "var",
            },
        );
        kv(&mut s, "lbp.points", &self.lbp.points);
        kv(&mut s, "lbp.radius", &self.lbp.radius);
        kv(&mut s, "ae.mode", &self.ae_mode);
        kv(&mut s, "ae.layers", &self.ae.layers);
        kv(&mut s, "ae.width", &width_name(self.ae.width));
        kv(&mut s, "ae.activation", &activation_name(self.ae.activation));
        kv(
            &mut s,
            "ae.loss",
            &match self.ae.loss {
                ReconLoss::Auto => "auto",
                ReconLoss::Mse => "mse",
                ReconLoss::Bce => "bce",
            },
        );
        kv(&mut s, "ae.noise_sigma", &self.ae.noise_sigma);
        kv(
            &mut s,
            "fusion",
            &match self.fusion {
                FusionKind::Vae => "vae",
                FusionKind::Ae => "ae",
                FusionKind::None => "none",
            },
        );
        kv(&mut s, "vae.layers", &self.vae.layers);
        kv(&mut s, "vae.width", &width_name(self.vae.width));
        kv(&mut s, "vae.latent_dim", &self.vae.latent_dim);
        match self.selector {
            Some(rule) => kv(&mut s, "selector", &rule),
            None => kv(&mut s, "selector", &"none"),
        }
        kv(&mut s, "synthesis", &self.synthesis);
        kv(&mut s, "alpha", &self.alpha);
        kv(&mut s, "beta", &self.beta);
        kv(&mut s, "jitter.sigma", &self.jitter_sigma);
        kv(&mut s, "classifier", &self.classifier);
        kv(&mut s, "svm.kernel", &kernel_name(self.svm.kernel));
        kv(&mut s, "svm.degree", &self.svm_degree);
        kv(&mut s, "svm.gamma", &self.svm.gamma);
        kv(&mut s, "svm.c", &self.svm.c);
        kv(&mut s, "svm.tol", &self.svm.tol);
        kv(&mut s, "svm.tune", &self.svm_tune);
        kv(&mut s, "nb.var_floor", &self.nb.var_floor);
        kv(&mut s, "mlp.hidden", &self.mlp_hidden);
        kv(&mut s, "mlp.epochs", &self.mlp_epochs);
        kv(&mut s, "mlp.batch_size", &self.mlp_batch_size);
        kv(&mut s, "oneclass.kernel", &kernel_name(self.oneclass.kernel));
        kv(&mut s, "oneclass.gamma", &self.oneclass.gamma);
        kv(&mut s, "oneclass.nu", &self.oneclass.nu);
        kv(&mut s, "train.epochs", &self.train_epochs);
        kv(&mut s, "train.batch_size", &self.train_batch_size);
        kv(&mut s, "train.optimizer", &self.optimizer_kind);
        kv(&mut s, "train.lr", &self.learning_rate);
        kv(&mut s, "train.staged", &self.staged);
        kv(&mut s, "folds", &self.folds);
        kv(&mut s, "outlier_pct", &self.outlier_pct);
        kv(&mut s, "split.train", &self.split.train);
        kv(&mut s, "split.val", &self.split.val);
        kv(&mut s, "split.test", &self.split.test);
        kv(&mut s, "seed", &self.seed);
        s
    }

    /// Hash of the canonical text; identifies the configuration in reports.
    pub fn fingerprint(&self) -> u64 {
        rng::fnv1a64(self.to_text().as_bytes())
    }

    /// Enforce the cross-stage invariants and every component's own checks.
    pub fn validate(&self) -> Result<()> {
        if self.fusion == FusionKind::None {
            if self.selector.is_some() {
                return Err(Error::config(
                    "fusion=none leaves no latent space to select from; set selector=none",
                ));
            }
            if self.synthesis != SynthesisMode::None {
                return Err(Error::config(
                    "fusion=none leaves no latent space to synthesize in; set synthesis=none",
                ));
            }
        }
        if self.synthesis == SynthesisMode::None && self.classifier != ClassifierKind::OneClass {
            return Err(Error::config(
                "synthesis=none produces no negative samples; use classifier=one_class",
            ));
        }
        if self.synthesis != SynthesisMode::None && self.classifier == ClassifierKind::OneClass {
            return Err(Error::config(
                "classifier=one_class ignores synthesized negatives; set synthesis=none or pick a binary classifier",
            ));
        }
        if self.synthesis == SynthesisMode::Jitter && self.fusion != FusionKind::Ae {
            return Err(Error::config(
                "synthesis=jitter perturbs autoencoder codes and requires fusion=ae",
            ));
        }
        if self.svm_tune && self.classifier != ClassifierKind::Svm {
            return Err(Error::config(
                "svm.tune=true requires classifier=svm",
            ));
        }
        if matches!(
            self.synthesis,
            SynthesisMode::Stochastic | SynthesisMode::Deterministic
        ) && self.fusion != FusionKind::Vae
        {
            return Err(Error::config(format!(
                "synthesis={} needs the distribution space and requires fusion=vae",
                self.synthesis
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::config(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::config(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.jitter_sigma.is_finite() && self.jitter_sigma >= 0.0) {
            return Err(Error::config("jitter.sigma must be >= 0"));
        }
        if self.folds < 1 {
            return Err(Error::config("folds must be >= 1"));
        }
        if !(self.outlier_pct > 0.0 && self.outlier_pct < 100.0) {
            return Err(Error::config(format!(
                "outlier_pct must be in (0, 100), got {}",
                self.outlier_pct
            )));
        }
        if self.train_epochs == 0 || self.train_batch_size == 0 {
            return Err(Error::config("train.epochs and train.batch_size must be >= 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config("train.lr must be > 0"));
        }
        if self.mlp_hidden == 0 || self.mlp_epochs == 0 || self.mlp_batch_size == 0 {
            return Err(Error::config("mlp.hidden/epochs/batch_size must be >= 1"));
        }
        self.split.validate()?;
        self.ae.validate()?;
        self.vae.validate()?;
        self.classifier_spec().validate()?;
        self.hierarchy_spec().validate()?;
        Ok(())
    }

    /// The descriptor list as concrete feature extractors, in canonical
    /// order.
    pub fn feature_kinds(&self) -> Vec<FeatureKind> {
        self.features
            .iter()
            .map(|f| match f.as_str() {
                "hog" => FeatureKind::Hog(self.hog.clone()),
                "lbp" => FeatureKind::Lbp(self.lbp.clone()),
                _ => FeatureKind::Raw,
            })
            .collect()
    }

    pub fn optimizer(&self) -> Optimizer {
        match self.optimizer_kind.as_str() {
            "sgd" => Optimizer::Sgd {
                lr: self.learning_rate,
            },
            _ => Optimizer::adam(self.learning_rate),
        }
    }

    /// The hierarchy spec this configuration trains. `ae.mode=concatenated`
    /// is realized by concatenating descriptors before the hierarchy, so it
    /// maps to `ae_enabled=true` over a single feature group.
    pub fn hierarchy_spec(&self) -> HierarchySpec {
        HierarchySpec {
            ae_enabled: self.ae_mode != AeMode::None,
            ae: self.ae.clone(),
            fusion: self.fusion,
            vae: self.vae.clone(),
            epochs: self.train_epochs,
            batch_size: self.train_batch_size,
            optimizer: self.optimizer(),
            staged: self.staged,
        }
    }

    pub fn classifier_spec(&self) -> ClassifierSpec {
        match self.classifier {
            ClassifierKind::Svm => ClassifierSpec::Svm(self.svm),
            ClassifierKind::Nb => ClassifierSpec::NaiveBayes(self.nb),
            ClassifierKind::Mlp => {
                let mut p = MlpParams::default();
                p.hidden = self.mlp_hidden;
                p.train.epochs = self.mlp_epochs;
                p.train.batch_size = self.mlp_batch_size;
                ClassifierSpec::Mlp(p)
            }
            ClassifierKind::OneClass => ClassifierSpec::OneClass(self.oneclass),
        }
    }
}

fn width_name(w: WidthRule) -> &'static str {
    match w {
        WidthRule::Same => "same",
        WidthRule::Double => "double",
        WidthRule::Half => "half",
    }
}

fn activation_name(a: Activation) -> &'static str {
    match a {
        Activation::Relu => "relu",
        Activation::Sigmoid => "sigmoid",
        Activation::Tanh => "tanh",
        Activation::Linear => "linear",
    }
}

fn kernel_name(k: Kernel) -> &'static str {
    match k {
        Kernel::Linear => "linear",
        Kernel::Poly { .. } => "poly",
        Kernel::Rbf => "rbf",
        Kernel::Sigmoid => "sigmoid",
    }
}

//! The two-level representation hierarchy.
//!
//! Level one is a set of denoising autoencoders, one per feature descriptor;
//! their code vectors are concatenated (in the canonical descriptor order)
//! into the fusion vector `w`. Level two is a variational autoencoder over
//! `w` whose Gaussian head assigns every sample a latent distribution
//! `q(z|w) = N(mu, diag(sigma^2))`. Encoding every training inlier yields the
//! distribution catalog `Q` that the boundary stage works on.
//!
//! ## Objective
//!
//! With feature reconstructions `g_hat_i`, fusion reconstruction `w_hat`, and
//! the VAE posterior `(mu, sigma)`:
//!
//! ```text
//! L_f = sum_i  recon(g_hat_i, g_i)                  (per feature AE)
//! L_h = ||w_hat - w||^2 + KL(q(z|w) || N(0, I))     (fusion VAE)
//! L   = L_f + L_h
//! ```
//!
//! Reductions are pinned: **sum over vector dimensions, mean over the
//! batch**. The KL divergence of a diagonal Gaussian against the standard
//! normal is `0.5 * sum_d (sigma_d^2 + mu_d^2 - 1 - ln sigma_d^2)`.
//!
//! In joint training (the default) the whole stack is optimized together.
//! The fusion reconstruction term then sees `w` twice: once as the VAE input
//! and once as the regression target, and both paths contribute to the
//! gradients flowing back into the encoders; dropping the target-side term
//! `-2 (w_hat - w)` is a classic subtle bug, and the finite-difference tests
//! pin it down.
//!
//! ## Reconstruction loss choice
//!
//! `recon` for the feature AEs is squared error by default; for inputs that
//! live in `[0, 1]` (image descriptors here) the `auto` setting switches to a
//! per-dimension binary cross entropy, and the decoder output activation is
//! sigmoid in that case, linear otherwise. The fusion reconstruction is
//! always squared error (codes are not probability-like). The choice is
//! resolved per feature at fit time from the observed data range.
//!
//! ## Noise
//!
//! Denoising corruption `N(0, noise_sigma^2)` is added to the autoencoder
//! inputs during training only; reconstruction targets stay clean, and
//! evaluation/encoding never corrupts. The VAE uses the standard
//! reparameterization `z = mu + sigma * eps`, `eps ~ N(0, I)`.

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::nnet::{Activation, DenseNet, ForwardCache, Gradients, OptimState, Optimizer};
use crate::rng;

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

/// Layer width relative to the input dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthRule {
    Same,
    Double,
    Half,
}

impl WidthRule {
    pub fn width(&self, input_dim: usize) -> usize {
        match self {
            WidthRule::Same => input_dim,
            WidthRule::Double => input_dim * 2,
            WidthRule::Half => (input_dim / 2).max(1),
        }
    }
}

impl std::str::FromStr for WidthRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same" => Ok(WidthRule::Same),
            "double" => Ok(WidthRule::Double),
            "half" => Ok(WidthRule::Half),
            other => Err(Error::config(format!(
                "unknown width rule '{other}' (expected same|double|half)"
            ))),
        }
    }
}

/// Feature-AE reconstruction loss configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconLoss {
    /// BCE when the feature values lie in `[0, 1]`, squared error otherwise.
    Auto,
    Mse,
    Bce,
}

/// Resolved reconstruction kind for one feature AE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconKind {
    Mse,
    Bce,
}

impl std::str::FromStr for ReconLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ReconLoss::Auto),
            "mse" => Ok(ReconLoss::Mse),
            "bce" => Ok(ReconLoss::Bce),
            other => Err(Error::config(format!(
                "unknown reconstruction loss '{other}' (expected auto|mse|bce)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AeSpec {
    /// Total hidden layers, odd; the middle one is the code layer.
    pub layers: usize,
    pub width: WidthRule,
    pub activation: Activation,
    pub loss: ReconLoss,
    /// Standard deviation of the denoising corruption.
    pub noise_sigma: f64,
}

impl Default for AeSpec {
    fn default() -> Self {
        AeSpec {
            layers: 1,
            width: WidthRule::Same,
            activation: Activation::Relu,
            loss: ReconLoss::Auto,
            noise_sigma: 0.1,
        }
    }
}

impl AeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.layers % 2 == 0 {
            return Err(Error::config(format!(
                "ae.layers must be odd (symmetric autoencoder), got {}",
                self.layers
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::config("ae.noise_sigma must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VaeSpec {
    /// Hidden layers in the encoder trunk (the decoder mirrors them).
    pub layers: usize,
    pub width: WidthRule,
    pub latent_dim: usize,
}

impl Default for VaeSpec {
    fn default() -> Self {
        VaeSpec {
            layers: 1,
            width: WidthRule::Same,
            latent_dim: 2,
        }
    }
}

impl VaeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::config("vae.layers must be >= 1"));
        }
        if self.latent_dim == 0 {
            return Err(Error::config("vae.latent_dim must be >= 1"));
        }
        Ok(())
    }
}

/// Which fusion model sits on top of the concatenated codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionKind {
    Vae,
    /// Plain (non-variational) autoencoder; used by the jitter ablation.
    Ae,
    /// No fusion model: `w` itself is the representation.
    None,
}

impl std::str::FromStr for FusionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vae" => Ok(FusionKind::Vae),
            "ae" => Ok(FusionKind::Ae),
            "none" => Ok(FusionKind::None),
            other => Err(Error::config(format!(
                "unknown fusion '{other}' (expected vae|ae|none)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HierarchySpec {
    /// When false the feature AEs are skipped and the fusion model consumes
    /// the concatenated raw features (the "no-AE" ablation).
    pub ae_enabled: bool,
    pub ae: AeSpec,
    pub fusion: FusionKind,
    pub vae: VaeSpec,
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: Optimizer,
    /// Two-phase training (AEs first, then the fusion model on frozen codes)
    /// instead of the default joint optimization.
    pub staged: bool,
}

impl Default for HierarchySpec {
    fn default() -> Self {
        HierarchySpec {
            ae_enabled: true,
            ae: AeSpec::default(),
            fusion: FusionKind::Vae,
            vae: VaeSpec::default(),
            epochs: 50,
            batch_size: 128,
            optimizer: Optimizer::default(),
            staged: false,
        }
    }
}

impl HierarchySpec {
    pub fn validate(&self) -> Result<()> {
        self.ae.validate()?;
        self.vae.validate()?;
        self.optimizer.validate()?;
        if self.epochs == 0 {
            return Err(Error::config("hierarchy epochs must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("hierarchy batch_size must be >= 1"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Model components
// ---------------------------------------------------------------------------

/// Denoising autoencoder for one feature descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureAe {
    pub encoder: DenseNet,
    pub decoder: DenseNet,
    pub recon: ReconKind,
    pub noise_sigma: f64,
}

impl FeatureAe {
    /// Build encoder/decoder for an input of `input_dim`. `unit_interval`
    /// reports whether the training data lies in `[0, 1]`; it resolves the
    /// `auto` loss and the final decoder activation.
    pub fn new(
        input_dim: usize,
        spec: &AeSpec,
        unit_interval: bool,
        rng: &mut impl rand::Rng,
    ) -> Result<Self> {
        spec.validate()?;
        let h = spec.width.width(input_dim);
        let enc_depth = spec.layers / 2 + 1; // hidden layers up to and including the code
        let dec_depth = spec.layers / 2; // hidden layers after the code
        let recon = match spec.loss {
            ReconLoss::Mse => ReconKind::Mse,
            ReconLoss::Bce => ReconKind::Bce,
            ReconLoss::Auto => {
                if unit_interval {
                    ReconKind::Bce
                } else {
                    ReconKind::Mse
                }
            }
        };
        if recon == ReconKind::Bce && !unit_interval {
            return Err(Error::config(
                "ae.loss = bce requires features in [0, 1]",
            ));
        }
        let final_act = if unit_interval {
            Activation::Sigmoid
        } else {
            Activation::Linear
        };

        let mut enc_sizes = vec![input_dim];
        enc_sizes.extend(std::iter::repeat(h).take(enc_depth));
        let enc_acts = vec![spec.activation; enc_depth];
        let encoder = DenseNet::new(&enc_sizes, &enc_acts, rng)?;

        let mut dec_sizes = vec![h];
        dec_sizes.extend(std::iter::repeat(h).take(dec_depth));
        dec_sizes.push(input_dim);
        let mut dec_acts = vec![spec.activation; dec_depth];
        dec_acts.push(final_act);
        let decoder = DenseNet::new(&dec_sizes, &dec_acts, rng)?;

        Ok(FeatureAe {
            encoder,
            decoder,
            recon,
            noise_sigma: spec.noise_sigma,
        })
    }

    pub fn code_dim(&self) -> usize {
        self.encoder.out_dim()
    }

    pub fn encode(&self, x: &Array2<f64>) -> Array2<f64> {
        self.encoder.forward(x)
    }
}

/// Variational autoencoder over the fusion vector `w`.
///
/// Architecture: a trunk of `layers` hidden tanh layers, two linear heads
/// (`mu`, `log sigma^2`), and a decoder mirroring the trunk with a linear
/// output. The hidden activation is pinned to tanh — bounded and
/// sign-preserving, so far out-of-range codes saturate to distinct corners
/// instead of a dead constant; the configurable activation grid applies to
/// the feature AEs.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionVae {
    pub trunk: DenseNet,
    pub mu_head: DenseNet,
    pub logvar_head: DenseNet,
    pub decoder: DenseNet,
}

impl FusionVae {
    pub fn new(input_dim: usize, spec: &VaeSpec, rng: &mut impl rand::Rng) -> Result<Self> {
        spec.validate()?;
        let h = spec.width.width(input_dim);
        let mut trunk_sizes = vec![input_dim];
        trunk_sizes.extend(std::iter::repeat(h).take(spec.layers));
        let trunk = DenseNet::new(&trunk_sizes, &vec![Activation::Tanh; spec.layers], rng)?;
        let mu_head = DenseNet::new(&[h, spec.latent_dim], &[Activation::Linear], rng)?;
        let logvar_head = DenseNet::new(&[h, spec.latent_dim], &[Activation::Linear], rng)?;
        let mut dec_sizes = vec![spec.latent_dim];
        dec_sizes.extend(std::iter::repeat(h).take(spec.layers));
        dec_sizes.push(input_dim);
        let mut dec_acts = vec![Activation::Tanh; spec.layers];
        dec_acts.push(Activation::Linear);
        let decoder = DenseNet::new(&dec_sizes, &dec_acts, rng)?;
        Ok(FusionVae {
            trunk,
            mu_head,
            logvar_head,
            decoder,
        })
    }

    pub fn latent_dim(&self) -> usize {
        self.mu_head.out_dim()
    }

    /// Posterior parameters `(mu, logvar)` for each row of `w`.
    pub fn encode(&self, w: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
        let t = self.trunk.forward(w);
        (self.mu_head.forward(&t), self.logvar_head.forward(&t))
    }
}

/// Plain autoencoder over `w` (jitter ablation). The encoder ends in a
/// linear code layer of `latent_dim` units.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionAe {
    pub encoder: DenseNet,
    pub decoder: DenseNet,
}

impl FusionAe {
    pub fn new(input_dim: usize, spec: &VaeSpec, rng: &mut impl rand::Rng) -> Result<Self> {
        spec.validate()?;
        let h = spec.width.width(input_dim);
        let mut enc_sizes = vec![input_dim];
        enc_sizes.extend(std::iter::repeat(h).take(spec.layers));
        enc_sizes.push(spec.latent_dim);
        let mut enc_acts = vec![Activation::Tanh; spec.layers];
        enc_acts.push(Activation::Linear);
        let encoder = DenseNet::new(&enc_sizes, &enc_acts, rng)?;
        let mut dec_sizes = vec![spec.latent_dim];
        dec_sizes.extend(std::iter::repeat(h).take(spec.layers));
        dec_sizes.push(input_dim);
        let mut dec_acts = vec![Activation::Tanh; spec.layers];
        dec_acts.push(Activation::Linear);
        let decoder = DenseNet::new(&dec_sizes, &dec_acts, rng)?;
        Ok(FusionAe { encoder, decoder })
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.out_dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fusion {
    Vae(FusionVae),
    Ae(FusionAe),
    None,
}

impl Fusion {
    pub fn kind(&self) -> FusionKind {
        match self {
            Fusion::Vae(_) => FusionKind::Vae,
            Fusion::Ae(_) => FusionKind::Ae,
            Fusion::None => FusionKind::None,
        }
    }
}

/// The fitted hierarchy: feature AEs (possibly none) plus the fusion model.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyModel {
    pub aes: Vec<FeatureAe>,
    pub fusion: Fusion,
}

/// One latent Gaussian per training inlier: the catalog `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentCatalog {
    /// Shape `[n, latent_dim]`.
    pub mu: Array2<f64>,
    /// Shape `[n, latent_dim]`, strictly positive.
    pub sigma: Array2<f64>,
}

impl LatentCatalog {
    pub fn len(&self) -> usize {
        self.mu.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.mu.ncols()
    }
}

impl HierarchyModel {
    /// Concatenated code vector `w` for each sample (clean inputs, no
    /// corruption). With AEs disabled this is the concatenated features.
    pub fn codes(&self, features: &[Array2<f64>]) -> Result<Array2<f64>> {
        check_feature_group(features)?;
        if self.aes.is_empty() {
            return Ok(concat_columns(features));
        }
        if features.len() != self.aes.len() {
            return Err(Error::config(format!(
                "model has {} feature AEs but {} feature matrices were supplied",
                self.aes.len(),
                features.len()
            )));
        }
        let codes: Vec<Array2<f64>> = self
            .aes
            .iter()
            .zip(features)
            .map(|(ae, g)| ae.encode(g))
            .collect();
        Ok(concat_columns(&codes))
    }

    /// Latent distributions for each sample; requires VAE fusion.
    pub fn encode_distributions(&self, features: &[Array2<f64>]) -> Result<LatentCatalog> {
        let w = self.codes(features)?;
        match &self.fusion {
            Fusion::Vae(vae) => {
                let (mu, logvar) = vae.encode(&w);
                let sigma = logvar.mapv(|lv| (0.5 * lv).exp());
                if sigma.iter().any(|s| !s.is_finite()) {
                    return Err(Error::numeric(
                        "posterior sigma overflowed; the VAE diverged",
                    ));
                }
                Ok(LatentCatalog { mu, sigma })
            }
            _ => Err(Error::config(
                "latent distributions require fusion = vae",
            )),
        }
    }

    /// The classifier input space: posterior means for VAE fusion, codes for
    /// AE fusion, and `w` itself without fusion.
    pub fn represent(&self, features: &[Array2<f64>]) -> Result<Array2<f64>> {
        let w = self.codes(features)?;
        match &self.fusion {
            Fusion::Vae(vae) => Ok(vae.encode(&w).0),
            Fusion::Ae(ae) => Ok(ae.encoder.forward(&w)),
            Fusion::None => Ok(w),
        }
    }

    /// Dimension of `represent()` outputs.
    pub fn representation_dim(&self, feature_dims: &[usize]) -> usize {
        match &self.fusion {
            Fusion::Vae(vae) => vae.latent_dim(),
            Fusion::Ae(ae) => ae.latent_dim(),
            Fusion::None => {
                if self.aes.is_empty() {
                    feature_dims.iter().sum()
                } else {
                    self.aes.iter().map(|ae| ae.code_dim()).sum()
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

use crate::nnet::BCE_CLAMP;

/// Per-feature reconstruction loss, summed over dimensions and samples.
fn recon_sum(kind: ReconKind, pred: &Array2<f64>, target: &Array2<f64>) -> f64 {
    match kind {
        ReconKind::Mse => ndarray::Zip::from(pred).and(target).fold(0.0, |acc, &p, &t| {
            let e = p - t;
            acc + e * e
        }),
        ReconKind::Bce => ndarray::Zip::from(pred).and(target).fold(0.0, |acc, &p, &t| {
            let p = p.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
            acc - t * p.ln() - (1.0 - t) * (1.0 - p).ln()
        }),
    }
}

/// `d(recon_sum)/d(pred) * scale` (scale carries the 1/batch factor).
fn recon_grad(kind: ReconKind, pred: &Array2<f64>, target: &Array2<f64>, scale: f64) -> Array2<f64> {
    let mut g = Array2::zeros(pred.raw_dim());
    match kind {
        ReconKind::Mse => {
            ndarray::Zip::from(&mut g)
                .and(pred)
                .and(target)
                .for_each(|g, &p, &t| *g = 2.0 * (p - t) * scale);
        }
        ReconKind::Bce => {
            ndarray::Zip::from(&mut g)
                .and(pred)
                .and(target)
                .for_each(|g, &p, &t| {
                    *g = if (BCE_CLAMP..=1.0 - BCE_CLAMP).contains(&p) {
                        (-t / p + (1.0 - t) / (1.0 - p)) * scale
                    } else {
                        0.0
                    };
                });
        }
    }
    g
}

/// `KL(N(mu, diag(sigma^2)) || N(0, I))`, summed over dimensions.
pub fn kl_to_standard_normal(mu: &[f64], sigma: &[f64]) -> f64 {
    debug_assert_eq!(mu.len(), sigma.len());
    mu.iter()
        .zip(sigma)
        .map(|(&m, &s)| {
            let v = s * s;
            0.5 * (v + m * m - 1.0 - v.ln())
        })
        .sum()
}

/// KL in the log-variance parameterization used internally.
fn kl_sum_logvar(mu: &Array2<f64>, logvar: &Array2<f64>) -> f64 {
    ndarray::Zip::from(mu).and(logvar).fold(0.0, |acc, &m, &lv| {
        acc + 0.5 * (lv.exp() + m * m - 1.0 - lv)
    })
}

/// Component values of the hierarchy objective, already mean-reduced over
/// the batch.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LossParts {
    pub feature_recon: f64,
    pub fusion_recon: f64,
    pub kl: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.feature_recon + self.fusion_recon + self.kl
    }
}

// ---------------------------------------------------------------------------
// Joint forward/backward with frozen noise
// ---------------------------------------------------------------------------

/// Noise drawn for one batch: per-feature corruption added to the AE inputs
/// and the reparameterization draw for the VAE. Freezing these makes the
/// whole objective a deterministic function of the parameters, which is what
/// the finite-difference gradient checks differentiate.
#[derive(Debug, Clone)]
pub struct BatchNoise {
    /// One matrix per feature AE, shape `[n, d_i]`; empty when AEs are off.
    pub corruption: Vec<Array2<f64>>,
    /// Shape `[n, latent_dim]`; empty (0 columns allowed) when fusion != vae.
    pub eps: Array2<f64>,
}

impl BatchNoise {
    /// Zero corruption and zero eps: the deterministic objective used for
    /// evaluation-style passes.
    pub fn zeros(model: &HierarchyModel, features: &[Array2<f64>]) -> BatchNoise {
        let n = features.first().map_or(0, |f| f.nrows());
        let corruption = model
            .aes
            .iter()
            .zip(features)
            .map(|(_, f)| Array2::zeros(f.raw_dim()))
            .collect();
        let dz = match &model.fusion {
            Fusion::Vae(v) => v.latent_dim(),
            _ => 0,
        };
        BatchNoise {
            corruption,
            eps: Array2::zeros((n, dz)),
        }
    }
}

struct AePass {
    enc_cache: ForwardCache,
    dec_cache: ForwardCache,
    clean: Array2<f64>,
}

struct VaePass {
    trunk_cache: ForwardCache,
    mu_cache: ForwardCache,
    logvar_cache: ForwardCache,
    dec_cache: ForwardCache,
    z_sigma_eps: Array2<f64>, // sigma * eps, needed for d z / d logvar
}

struct AeFusionPass {
    enc_cache: ForwardCache,
    dec_cache: ForwardCache,
}

struct JointCache {
    ae_passes: Vec<AePass>,
    w: Array2<f64>,
    vae_pass: Option<VaePass>,
    ae_fusion_pass: Option<AeFusionPass>,
}

/// Forward pass of the full hierarchy on one batch with frozen noise.
fn joint_forward(
    model: &HierarchyModel,
    features: &[Array2<f64>],
    noise: &BatchNoise,
) -> Result<JointCache> {
    let n = features[0].nrows();
    let mut ae_passes = Vec::with_capacity(model.aes.len());
    let w = if model.aes.is_empty() {
        concat_columns(features)
    } else {
        let mut codes = Vec::with_capacity(model.aes.len());
        for (i, (ae, clean)) in model.aes.iter().zip(features).enumerate() {
            let corrupted = clean + &noise.corruption[i];
            let enc_cache = ae.encoder.forward_cached(&corrupted);
            let dec_cache = ae.decoder.forward_cached(enc_cache.output());
            codes.push(enc_cache.output().clone());
            ae_passes.push(AePass {
                enc_cache,
                dec_cache,
                clean: clean.clone(),
            });
        }
        concat_columns(&codes)
    };

    let (vae_pass, ae_fusion_pass) = match &model.fusion {
        Fusion::Vae(vae) => {
            let trunk_cache = vae.trunk.forward_cached(&w);
            let mu_cache = vae.mu_head.forward_cached(trunk_cache.output());
            let logvar_cache = vae.logvar_head.forward_cached(trunk_cache.output());
            let mu = mu_cache.output();
            let logvar = logvar_cache.output();
            if logvar.iter().any(|lv| !lv.is_finite()) {
                return Err(Error::numeric("logvar head produced non-finite values"));
            }
            debug_assert_eq!(noise.eps.dim(), (n, vae.latent_dim()));
            let sigma_eps = ndarray::Zip::from(logvar)
                .and(&noise.eps)
                .map_collect(|&lv, &e| (0.5 * lv).exp() * e);
            let z = mu + &sigma_eps;
            let dec_cache = vae.decoder.forward_cached(&z);
            (
                Some(VaePass {
                    trunk_cache,
                    mu_cache,
                    logvar_cache,
                    dec_cache,
                    z_sigma_eps: sigma_eps,
                }),
                None,
            )
        }
        Fusion::Ae(fae) => {
            let enc_cache = fae.encoder.forward_cached(&w);
            let dec_cache = fae.decoder.forward_cached(enc_cache.output());
            (None, Some(AeFusionPass { enc_cache, dec_cache }))
        }
        Fusion::None => (None, None),
    };

    Ok(JointCache {
        ae_passes,
        w,
        vae_pass,
        ae_fusion_pass,
    })
}

fn joint_loss(model: &HierarchyModel, cache: &JointCache) -> LossParts {
    let n = cache.w.nrows() as f64;
    let mut feature_recon = 0.0;
    for (ae, pass) in model.aes.iter().zip(&cache.ae_passes) {
        feature_recon += recon_sum(ae.recon, pass.dec_cache.output(), &pass.clean);
    }
    let (fusion_recon, kl) = match (&cache.vae_pass, &cache.ae_fusion_pass) {
        (Some(vp), _) => {
            let recon = recon_sum(ReconKind::Mse, vp.dec_cache.output(), &cache.w);
            let kl = kl_sum_logvar(vp.mu_cache.output(), vp.logvar_cache.output());
            (recon, kl)
        }
        (None, Some(ap)) => (
            recon_sum(ReconKind::Mse, ap.dec_cache.output(), &cache.w),
            0.0,
        ),
        (None, None) => (0.0, 0.0),
    };
    LossParts {
        feature_recon: feature_recon / n,
        fusion_recon: fusion_recon / n,
        kl: kl / n,
    }
}

/// Gradients for every network in the model, in the fixed order
/// `[enc_0, dec_0, enc_1, dec_1, ..., fusion nets...]` where the fusion nets
/// are `[trunk, mu_head, logvar_head, decoder]` for a VAE and
/// `[encoder, decoder]` for a plain fusion AE.
fn joint_backward(model: &HierarchyModel, cache: &JointCache) -> Vec<Gradients> {
    let n = cache.w.nrows() as f64;
    let scale = 1.0 / n;

    // dL/dw accumulates the fusion-model paths.
    let mut dw: Array2<f64> = Array2::zeros(cache.w.raw_dim());
    let mut fusion_grads: Vec<Gradients> = Vec::new();

    match (&model.fusion, &cache.vae_pass, &cache.ae_fusion_pass) {
        (Fusion::Vae(vae), Some(vp), _) => {
            let w_hat = vp.dec_cache.output();
            // d/d w_hat of ||w_hat - w||^2 / n.
            let d_what = ndarray::Zip::from(w_hat)
                .and(&cache.w)
                .map_collect(|&p, &t| 2.0 * (p - t) * scale);
            let (dec_g, dz) = vae.decoder.backward(&vp.dec_cache, &d_what);

            // z = mu + sigma*eps: dz flows to mu unchanged and to logvar as
            // dz * 0.5 * sigma * eps. KL adds mu/n and 0.5(e^lv - 1)/n.
            let mu = vp.mu_cache.output();
            let logvar = vp.logvar_cache.output();
            let d_mu = ndarray::Zip::from(&dz)
                .and(mu)
                .map_collect(|&d, &m| d + m * scale);
            let d_logvar = ndarray::Zip::from(&dz)
                .and(&vp.z_sigma_eps)
                .and(logvar)
                .map_collect(|&d, &se, &lv| d * 0.5 * se + 0.5 * (lv.exp() - 1.0) * scale);

            let (mu_g, dt_mu) = vae.mu_head.backward(&vp.mu_cache, &d_mu);
            let (lv_g, dt_lv) = vae.logvar_head.backward(&vp.logvar_cache, &d_logvar);
            let dt = &dt_mu + &dt_lv;
            let (trunk_g, dw_vae) = vae.trunk.backward(&vp.trunk_cache, &dt);

            // Both paths of ||w_hat - w||^2 with respect to w: through the
            // VAE input and through the regression target.
            dw += &dw_vae;
            ndarray::Zip::from(&mut dw)
                .and(w_hat)
                .and(&cache.w)
                .for_each(|g, &p, &t| *g += -2.0 * (p - t) * scale);

            fusion_grads.extend([trunk_g, mu_g, lv_g, dec_g]);
        }
        (Fusion::Ae(fae), _, Some(ap)) => {
            let w_hat = ap.dec_cache.output();
            let d_what = ndarray::Zip::from(w_hat)
                .and(&cache.w)
                .map_collect(|&p, &t| 2.0 * (p - t) * scale);
            let (dec_g, dcode) = fae.decoder.backward(&ap.dec_cache, &d_what);
            let (enc_g, dw_ae) = fae.encoder.backward(&ap.enc_cache, &dcode);
            dw += &dw_ae;
            ndarray::Zip::from(&mut dw)
                .and(w_hat)
                .and(&cache.w)
                .for_each(|g, &p, &t| *g += -2.0 * (p - t) * scale);
            fusion_grads.extend([enc_g, dec_g]);
        }
        _ => {}
    }

    // Feature AEs: reconstruction path plus their slice of dL/dw.
    let mut ae_grads: Vec<Gradients> = Vec::with_capacity(model.aes.len() * 2);
    let mut col = 0;
    for (ae, pass) in model.aes.iter().zip(&cache.ae_passes) {
        let code_dim = ae.code_dim();
        let d_recon = recon_grad(ae.recon, pass.dec_cache.output(), &pass.clean, scale);
        let (dec_g, dcode_recon) = ae.decoder.backward(&pass.dec_cache, &d_recon);
        let dcode_total = if cache.vae_pass.is_some() || cache.ae_fusion_pass.is_some() {
            &dcode_recon + &dw.slice(ndarray::s![.., col..col + code_dim])
        } else {
            dcode_recon
        };
        let (enc_g, _) = ae.encoder.backward(&pass.enc_cache, &dcode_total);
        ae_grads.push(enc_g);
        ae_grads.push(dec_g);
        col += code_dim;
    }

    ae_grads.extend(fusion_grads);
    ae_grads
}

/// Evaluate the hierarchy objective with frozen noise (public so gradient
/// checks can drive the exact training objective as a pure function).
pub fn hierarchy_loss_frozen(
    model: &HierarchyModel,
    features: &[Array2<f64>],
    noise: &BatchNoise,
) -> Result<LossParts> {
    check_feature_group(features)?;
    let cache = joint_forward(model, features, noise)?;
    Ok(joint_loss(model, &cache))
}

/// Loss plus analytic gradients with frozen noise, in the network order
/// documented on `hierarchy_net_order`.
pub fn hierarchy_grads_frozen(
    model: &HierarchyModel,
    features: &[Array2<f64>],
    noise: &BatchNoise,
) -> Result<(LossParts, Vec<Gradients>)> {
    check_feature_group(features)?;
    let cache = joint_forward(model, features, noise)?;
    let loss = joint_loss(model, &cache);
    let grads = joint_backward(model, &cache);
    Ok((loss, grads))
}

/// Human-readable labels matching the gradient order of
/// `hierarchy_grads_frozen` (and internal training updates).
pub fn hierarchy_net_order(model: &HierarchyModel) -> Vec<String> {
    let mut names = Vec::new();
    for i in 0..model.aes.len() {
        names.push(format!("ae{i}-encoder"));
        names.push(format!("ae{i}-decoder"));
    }
    match &model.fusion {
        Fusion::Vae(_) => {
            names.extend(["vae-trunk", "vae-mu", "vae-logvar", "vae-decoder"].map(String::from))
        }
        Fusion::Ae(_) => names.extend(["fusion-encoder", "fusion-decoder"].map(String::from)),
        Fusion::None => {}
    }
    names
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

/// Result of fitting the hierarchy on training inliers.
#[derive(Debug)]
pub struct HierarchyFit {
    pub model: HierarchyModel,
    /// The catalog `Q` over the training inliers (VAE fusion only).
    pub catalog: Option<LatentCatalog>,
    /// Per-epoch mean losses, in training order (both phases concatenated
    /// when staged).
    pub history: Vec<LossParts>,
}

/// Train the hierarchy on the given per-feature matrices (rows are training
/// inliers) and encode the catalog.
pub fn fit_hierarchy(
    features: &[Array2<f64>],
    spec: &HierarchySpec,
    master_seed: u64,
) -> Result<HierarchyFit> {
    spec.validate()?;
    check_feature_group(features)?;
    let n = features[0].nrows();
    if n < 2 {
        return Err(Error::data(format!(
            "hierarchy training needs at least 2 samples, got {n}"
        )));
    }

    // Build the model.
    let mut aes = Vec::new();
    if spec.ae_enabled {
        for (i, f) in features.iter().enumerate() {
            let unit = f.iter().all(|&v| (0.0..=1.0).contains(&v));
            let mut init_rng = rng::stream(master_seed, &format!("ae-init-{i}"));
            aes.push(FeatureAe::new(f.ncols(), &spec.ae, unit, &mut init_rng)?);
        }
    }
    let w_dim: usize = if aes.is_empty() {
        features.iter().map(|f| f.ncols()).sum()
    } else {
        aes.iter().map(|ae| ae.code_dim()).sum()
    };
    let mut vae_rng = rng::stream(master_seed, "vae-init");
    let fusion = match spec.fusion {
        FusionKind::Vae => Fusion::Vae(FusionVae::new(w_dim, &spec.vae, &mut vae_rng)?),
        FusionKind::Ae => Fusion::Ae(FusionAe::new(w_dim, &spec.vae, &mut vae_rng)?),
        FusionKind::None => Fusion::None,
    };
    let mut model = HierarchyModel { aes, fusion };

    // Train.
    let mut history = Vec::new();
    let has_fusion = !matches!(model.fusion, Fusion::None);
    let mut noise_rng = rng::stream(master_seed, "ae-noise");
    let mut eps_rng = rng::stream(master_seed, "vae-noise");
    let mut shuffle_rng = rng::stream(master_seed, "hier-shuffle");

    if spec.staged && !model.aes.is_empty() && has_fusion {
        let phase1 = run_phase(
            &mut model,
            features,
            spec,
            Phase::AesOnly,
            &mut noise_rng,
            &mut eps_rng,
            &mut shuffle_rng,
        )?;
        history.extend(phase1);
        let phase2 = run_phase(
            &mut model,
            features,
            spec,
            Phase::FusionOnly,
            &mut noise_rng,
            &mut eps_rng,
            &mut shuffle_rng,
        )?;
        history.extend(phase2);
    } else if !model.aes.is_empty() || has_fusion {
        let phase = run_phase(
            &mut model,
            features,
            spec,
            Phase::Joint,
            &mut noise_rng,
            &mut eps_rng,
            &mut shuffle_rng,
        )?;
        history.extend(phase);
    }

    let catalog = match &model.fusion {
        Fusion::Vae(_) => Some(model.encode_distributions(features)?),
        _ => None,
    };

    Ok(HierarchyFit {
        model,
        catalog,
        history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Joint,
    AesOnly,
    FusionOnly,
}

#[allow(clippy::too_many_arguments)]
fn run_phase(
    model: &mut HierarchyModel,
    features: &[Array2<f64>],
    spec: &HierarchySpec,
    phase: Phase,
    noise_rng: &mut impl rand::Rng,
    eps_rng: &mut impl rand::Rng,
    shuffle_rng: &mut impl rand::Rng,
) -> Result<Vec<LossParts>> {
    let n = features[0].nrows();
    let update_aes = phase != Phase::FusionOnly && !model.aes.is_empty();
    let update_fusion = phase != Phase::AesOnly && !matches!(model.fusion, Fusion::None);

    // In a phase that ignores the fusion model (or the AEs), drop the other
    // part from the working model so forward/backward skip it entirely, then
    // put it back afterwards.
    let mut detached_fusion: Option<Fusion> = None;
    if !update_fusion {
        detached_fusion = Some(std::mem::replace(&mut model.fusion, Fusion::None));
    }
    let frozen_aes = phase == Phase::FusionOnly;

    // Optimizer states in the same order as joint_backward's gradients.
    let mut states: Vec<OptimState> = Vec::new();
    if !frozen_aes {
        for ae in &model.aes {
            states.push(OptimState::new(&ae.encoder));
            states.push(OptimState::new(&ae.decoder));
        }
    }
    if update_fusion {
        match &model.fusion {
            Fusion::Vae(v) => {
                states.push(OptimState::new(&v.trunk));
                states.push(OptimState::new(&v.mu_head));
                states.push(OptimState::new(&v.logvar_head));
                states.push(OptimState::new(&v.decoder));
            }
            Fusion::Ae(a) => {
                states.push(OptimState::new(&a.encoder));
                states.push(OptimState::new(&a.decoder));
            }
            Fusion::None => {}
        }
    }

    // When the AEs are frozen we precompute their codes once and train the
    // fusion model on those codes as plain input features.
    let frozen_codes: Option<Array2<f64>> = if frozen_aes && !model.aes.is_empty() {
        Some(model.codes(features)?)
    } else {
        None
    };

    let mut history = Vec::with_capacity(spec.epochs);
    let mut indices: Vec<usize> = (0..n).collect();
    for epoch in 0..spec.epochs {
        indices.shuffle(shuffle_rng);
        let mut sums = LossParts {
            feature_recon: 0.0,
            fusion_recon: 0.0,
            kl: 0.0,
        };
        for (batch_no, batch) in indices.chunks(spec.batch_size).enumerate() {
            let bn = batch.len();
            // Assemble the batch view: either raw features through the AEs,
            // or frozen codes as a single pseudo-feature.
            let batch_feats: Vec<Array2<f64>> = match &frozen_codes {
                Some(codes) => vec![codes.select(Axis(0), batch)],
                None => features.iter().map(|f| f.select(Axis(0), batch)).collect(),
            };
            let working: &HierarchyModel = &if frozen_aes {
                HierarchyModel {
                    aes: Vec::new(),
                    fusion: model.fusion.clone(),
                }
            } else {
                model.clone()
            };

            // Draw the noise for this batch.
            let corruption: Vec<Array2<f64>> = if update_aes && spec.ae.noise_sigma > 0.0 {
                batch_feats
                    .iter()
                    .map(|f| {
                        Array2::from_shape_fn((bn, f.ncols()), |_| {
                            let z: f64 = StandardNormal.sample(noise_rng);
                            z * spec.ae.noise_sigma
                        })
                    })
                    .collect()
            } else {
                working
                    .aes
                    .iter()
                    .zip(&batch_feats)
                    .map(|(_, f)| Array2::zeros(f.raw_dim()))
                    .collect()
            };
            let eps = match &working.fusion {
                Fusion::Vae(v) => Array2::from_shape_fn((bn, v.latent_dim()), |_| {
                    StandardNormal.sample(eps_rng)
                }),
                _ => Array2::zeros((bn, 0)),
            };
            let noise = BatchNoise { corruption, eps };

            let cache = joint_forward(working, &batch_feats, &noise)?;
            let loss = joint_loss(working, &cache);
            if !loss.total().is_finite() {
                return Err(Error::numeric(format!(
                    "hierarchy loss diverged at epoch {epoch}, batch {batch_no}: {loss:?}"
                )));
            }
            let grads = joint_backward(working, &cache);
            debug_assert_eq!(grads.len(), states.len());

            // Apply updates back onto the real model.
            let mut gi = 0;
            if !frozen_aes {
                for ae in &mut model.aes {
                    states[gi].apply(&mut ae.encoder, &spec.optimizer, &grads[gi])?;
                    gi += 1;
                    states[gi].apply(&mut ae.decoder, &spec.optimizer, &grads[gi])?;
                    gi += 1;
                }
            }
            if update_fusion {
                match &mut model.fusion {
                    Fusion::Vae(v) => {
                        states[gi].apply(&mut v.trunk, &spec.optimizer, &grads[gi])?;
                        gi += 1;
                        states[gi].apply(&mut v.mu_head, &spec.optimizer, &grads[gi])?;
                        gi += 1;
                        states[gi].apply(&mut v.logvar_head, &spec.optimizer, &grads[gi])?;
                        gi += 1;
                        states[gi].apply(&mut v.decoder, &spec.optimizer, &grads[gi])?;
                        gi += 1;
                    }
                    Fusion::Ae(a) => {
                        states[gi].apply(&mut a.encoder, &spec.optimizer, &grads[gi])?;
                        gi += 1;
                        states[gi].apply(&mut a.decoder, &spec.optimizer, &grads[gi])?;
                        gi += 1;
                    }
                    Fusion::None => {}
                }
            }
            let _ = gi;

            sums.feature_recon += loss.feature_recon * bn as f64;
            sums.fusion_recon += loss.fusion_recon * bn as f64;
            sums.kl += loss.kl * bn as f64;
        }
        history.push(LossParts {
            feature_recon: sums.feature_recon / n as f64,
            fusion_recon: sums.fusion_recon / n as f64,
            kl: sums.kl / n as f64,
        });
    }

    if let Some(f) = detached_fusion {
        model.fusion = f;
    }
    Ok(history)
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

fn check_feature_group(features: &[Array2<f64>]) -> Result<()> {
    if features.is_empty() {
        return Err(Error::data("no feature matrices supplied"));
    }
    let n = features[0].nrows();
    if n == 0 {
        return Err(Error::data("feature matrices have zero rows"));
    }
    if features.iter().any(|f| f.nrows() != n) {
        return Err(Error::data(
            "feature matrices disagree on the number of samples",
        ));
    }
    if features.iter().any(|f| f.ncols() == 0) {
        return Err(Error::data("feature matrix with zero columns"));
    }
    Ok(())
}

fn concat_columns(mats: &[Array2<f64>]) -> Array2<f64> {
    let views: Vec<_> = mats.iter().map(|m| m.view()).collect();
    ndarray::concatenate(Axis(1), &views).expect("row counts already validated")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_features(n: usize) -> Vec<Array2<f64>> {
        let mut r = rng::stream(5, "toy");
        vec![
            Array2::from_shape_fn((n, 4), |_| rand::Rng::random_range(&mut r, 0.0..1.0)),
            Array2::from_shape_fn((n, 3), |_| rand::Rng::random_range(&mut r, 0.0..1.0)),
        ]
    }

    #[test]
    fn width_rules() {
        assert_eq!(WidthRule::Same.width(10), 10);
        assert_eq!(WidthRule::Double.width(10), 20);
        assert_eq!(WidthRule::Half.width(10), 5);
        assert_eq!(WidthRule::Half.width(1), 1);
    }

    #[test]
    fn ae_architecture_shapes() {
        let mut r = rng::stream(1, "t");
        // layers = 1: encoder d -> h, decoder h -> d.
        let ae = FeatureAe::new(8, &AeSpec::default(), true, &mut r).unwrap();
        assert_eq!(ae.encoder.in_dim(), 8);
        assert_eq!(ae.code_dim(), 8);
        assert_eq!(ae.encoder.layers.len(), 1);
        assert_eq!(ae.decoder.layers.len(), 1);
        assert_eq!(ae.decoder.out_dim(), 8);
        assert_eq!(ae.recon, ReconKind::Bce); // auto + unit interval
        assert_eq!(ae.decoder.layers.last().unwrap().act, Activation::Sigmoid);

        // layers = 5, half width: encoder 3 hidden, decoder 2 hidden + output.
        let spec = AeSpec {
            layers: 5,
            width: WidthRule::Half,
            ..AeSpec::default()
        };
        let ae = FeatureAe::new(8, &spec, false, &mut r).unwrap();
        assert_eq!(ae.encoder.layers.len(), 3);
        assert_eq!(ae.code_dim(), 4);
        assert_eq!(ae.decoder.layers.len(), 3);
        assert_eq!(ae.recon, ReconKind::Mse); // auto + unconstrained range
        assert_eq!(ae.decoder.layers.last().unwrap().act, Activation::Linear);

        // Even layer counts are rejected.
        let bad = AeSpec {
            layers: 2,
            ..AeSpec::default()
        };
        assert!(FeatureAe::new(8, &bad, true, &mut r).is_err());
        // BCE on unbounded data is rejected.
        let bad = AeSpec {
            loss: ReconLoss::Bce,
            ..AeSpec::default()
        };
        assert!(FeatureAe::new(8, &bad, false, &mut r).is_err());
    }

    #[test]
    fn vae_architecture_shapes() {
        let mut r = rng::stream(2, "t");
        let spec = VaeSpec {
            layers: 2,
            width: WidthRule::Double,
            latent_dim: 3,
        };
        let vae = FusionVae::new(5, &spec, &mut r).unwrap();
        assert_eq!(vae.trunk.in_dim(), 5);
        assert_eq!(vae.trunk.out_dim(), 10);
        assert_eq!(vae.trunk.layers.len(), 2);
        assert_eq!(vae.latent_dim(), 3);
        assert_eq!(vae.decoder.in_dim(), 3);
        assert_eq!(vae.decoder.out_dim(), 5);
        let w = Array2::zeros((4, 5));
        let (mu, lv) = vae.encode(&w);
        assert_eq!(mu.dim(), (4, 3));
        assert_eq!(lv.dim(), (4, 3));
    }

    #[test]
    fn kl_closed_form_hand_values() {
        // Standard normal against itself: zero.
        assert!(kl_to_standard_normal(&[0.0, 0.0], &[1.0, 1.0]).abs() < 1e-15);
        // One dimension, mu=1, sigma=1: 0.5 * (1 + 1 - 1 - 0) = 0.5.
        assert!((kl_to_standard_normal(&[1.0], &[1.0]) - 0.5).abs() < 1e-15);
        // sigma=2: 0.5 * (4 - 1 - ln 4) = 1.5 - ln 2.
        let expect = 0.5 * (4.0 - 1.0 - (4.0f64).ln());
        assert!((kl_to_standard_normal(&[0.0], &[2.0]) - expect).abs() < 1e-15);
        // KL is nonnegative.
        for (m, s) in [(0.3, 0.5), (-2.0, 1.7), (0.0, 0.1)] {
            assert!(kl_to_standard_normal(&[m], &[s]) >= 0.0);
        }
    }

    #[test]
    fn fit_produces_catalog_and_decreasing_loss() {
        let feats = toy_features(40);
        let spec = HierarchySpec {
            epochs: 30,
            batch_size: 8,
            vae: VaeSpec {
                layers: 1,
                width: WidthRule::Same,
                latent_dim: 2,
            },
            ..HierarchySpec::default()
        };
        let fit = fit_hierarchy(&feats, &spec, 11).unwrap();
        let catalog = fit.catalog.as_ref().expect("vae fusion yields a catalog");
        assert_eq!(catalog.len(), 40);
        assert_eq!(catalog.dim(), 2);
        assert!(catalog.sigma.iter().all(|&s| s > 0.0));
        let first = fit.history.first().unwrap().total();
        let last = fit.history.last().unwrap().total();
        assert!(last < first, "loss did not improve: {first} -> {last}");
        // Representation = posterior means.
        let rep = fit.model.represent(&feats).unwrap();
        assert_eq!(rep, catalog.mu);
    }

    #[test]
    fn fit_is_deterministic_in_the_seed() {
        let feats = toy_features(20);
        let spec = HierarchySpec {
            epochs: 5,
            batch_size: 8,
            ..HierarchySpec::default()
        };
        let a = fit_hierarchy(&feats, &spec, 7).unwrap();
        let b = fit_hierarchy(&feats, &spec, 7).unwrap();
        let c = fit_hierarchy(&feats, &spec, 8).unwrap();
        assert_eq!(a.catalog.as_ref().unwrap().mu, b.catalog.as_ref().unwrap().mu);
        assert_ne!(a.catalog.as_ref().unwrap().mu, c.catalog.as_ref().unwrap().mu);
    }

    #[test]
    fn no_ae_mode_feeds_raw_features_to_the_vae() {
        let feats = toy_features(20);
        let spec = HierarchySpec {
            ae_enabled: false,
            epochs: 3,
            batch_size: 8,
            ..HierarchySpec::default()
        };
        let fit = fit_hierarchy(&feats, &spec, 3).unwrap();
        assert!(fit.model.aes.is_empty());
        // w = concatenated features, 4 + 3 columns.
        let w = fit.model.codes(&feats).unwrap();
        assert_eq!(w.ncols(), 7);
        assert_eq!(w.column(4), feats[1].column(0));
        assert!(fit.history.iter().all(|l| l.feature_recon == 0.0));
        assert!(fit.catalog.is_some());
    }

    #[test]
    fn fusion_none_trains_aes_only() {
        let feats = toy_features(20);
        let spec = HierarchySpec {
            fusion: FusionKind::None,
            epochs: 3,
            batch_size: 8,
            ..HierarchySpec::default()
        };
        let fit = fit_hierarchy(&feats, &spec, 3).unwrap();
        assert!(fit.catalog.is_none());
        assert!(fit.history.iter().all(|l| l.kl == 0.0 && l.fusion_recon == 0.0));
        let rep = fit.model.represent(&feats).unwrap();
        assert_eq!(rep.ncols(), 7); // code dims 4 + 3 under the same-width rule
        assert!(fit.model.encode_distributions(&feats).is_err());
    }

    #[test]
    fn staged_and_joint_both_converge() {
        let feats = toy_features(30);
        for staged in [false, true] {
            let spec = HierarchySpec {
                staged,
                epochs: 10,
                batch_size: 10,
                ..HierarchySpec::default()
            };
            let fit = fit_hierarchy(&feats, &spec, 21).unwrap();
            assert!(fit.catalog.is_some());
            let expected_epochs = if staged { 20 } else { 10 };
            assert_eq!(fit.history.len(), expected_epochs);
        }
    }

    #[test]
    fn corruption_is_training_only() {
        // Encoding after fit is a pure function: same features, same codes.
        let feats = toy_features(16);
        let spec = HierarchySpec {
            epochs: 2,
            batch_size: 8,
            ..HierarchySpec::default()
        };
        let fit = fit_hierarchy(&feats, &spec, 1).unwrap();
        let a = fit.model.encode_distributions(&feats).unwrap();
        let b = fit.model.encode_distributions(&feats).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_inconsistent_inputs() {
        let bad = vec![Array2::<f64>::zeros((3, 2)), Array2::<f64>::zeros((4, 2))];
        assert!(fit_hierarchy(&bad, &HierarchySpec::default(), 0).is_err());
        assert!(fit_hierarchy(&[], &HierarchySpec::default(), 0).is_err());
        let one = vec![Array2::<f64>::zeros((1, 2))];
        assert!(fit_hierarchy(&one, &HierarchySpec::default(), 0).is_err());
    }
}

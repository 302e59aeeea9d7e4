//! Outskirt selection and synthetic outlier generation.
//!
//! Given the catalog `Q` of per-inlier latent Gaussians `(mu_i, sigma_i)`,
//! this stage first computes catalog meta-statistics over the means:
//!
//! * `mu_bar_d`: per-dimension mean of the `mu_i`,
//! * `sigma_bar_sq_d`: per-dimension variance of the `mu_i` (Bessel-corrected,
//!   `1/(|Q|-1)`),
//! * `mu_bar_l2` / `sigma_bar_l2`: mean and Bessel-corrected standard
//!   deviation of the Euclidean norms `||mu_i||`.
//!
//! A distribution belongs to the *outskirts* when its mean is far from the
//! catalog center:
//!
//! * ellipsoid rule: `sum_d (mu_d - mu_bar_d)^2 / (alpha * sigma_bar_sq_d) >= 1`,
//! * l2 rule: `| ||mu|| - mu_bar_l2 | >= alpha * sigma_bar_l2`.
//!
//! Synthetic outliers are drawn from outskirt distributions and pushed
//! *outward*: `y = mu + beta * s ⊙ sigma ⊙ eps`, where `s_d = +1` if
//! `mu_d >= mu_bar_d` and `-1` otherwise (ties +1), and `eps_d` is the
//! absolute value of a standard normal draw (`|N(0,1)|`) in the stochastic
//! mode. Keeping `eps` nonnegative preserves the outward direction per
//! dimension, so every synthetic sample is at least as far from the catalog
//! center as its source mean, dimension by dimension.
//!
//! In stochastic mode, source distributions are picked uniformly with
//! replacement from the outskirt set, and each sample's draws come from a
//! counter-indexed substream, so results do not depend on how samples are
//! batched across threads. In deterministic mode (`eps = 1` exactly) sources
//! are cycled in order instead, which makes the output — and everything
//! downstream of it — completely independent of the noise seed: one distinct
//! point per outskirt distribution, repeated as evenly as possible.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hierarchy::LatentCatalog;
use crate::rng;

/// Catalog meta-statistics over the latent means.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetaStats {
    pub mu_bar: Vec<f64>,
    /// Bessel-corrected per-dimension variance of the means.
    pub sigma_bar_sq: Vec<f64>,
    pub mu_bar_l2: f64,
    /// Bessel-corrected standard deviation of the mean norms.
    pub sigma_bar_l2: f64,
    pub n: usize,
}

/// Compute meta-statistics from a matrix whose rows are latent means.
///
/// Needs at least two rows for the Bessel correction, and every dimension
/// must actually spread (`sigma_bar_sq_d > 0`) for the ellipsoid rule to be
/// well defined.
pub fn meta_stats_of(mu: &Array2<f64>) -> Result<MetaStats> {
    let n = mu.nrows();
    let d = mu.ncols();
    if n < 2 {
        return Err(Error::data(format!(
            "meta statistics need at least 2 catalog entries, got {n}"
        )));
    }
    let mut mu_bar = vec![0.0; d];
    for row in mu.rows() {
        for (acc, &v) in mu_bar.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut mu_bar {
        *v /= n as f64;
    }
    let mut sigma_bar_sq = vec![0.0; d];
    for row in mu.rows() {
        for ((acc, &v), &m) in sigma_bar_sq.iter_mut().zip(row).zip(&mu_bar) {
            let e = v - m;
            *acc += e * e;
        }
    }
    for v in &mut sigma_bar_sq {
        *v /= (n - 1) as f64;
    }
    if let Some(axis) = sigma_bar_sq.iter().position(|&v| v == 0.0) {
        return Err(Error::data(format!(
            "degenerate catalog: the means have zero variance along axis {axis}"
        )));
    }

    let norms: Vec<f64> = mu
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mu_bar_l2 = norms.iter().sum::<f64>() / n as f64;
    let sigma_bar_l2 = (norms
        .iter()
        .map(|&v| {
            let e = v - mu_bar_l2;
            e * e
        })
        .sum::<f64>()
        / (n - 1) as f64)
        .sqrt();

    Ok(MetaStats {
        mu_bar,
        sigma_bar_sq,
        mu_bar_l2,
        sigma_bar_l2,
        n,
    })
}

pub fn meta_stats(catalog: &LatentCatalog) -> Result<MetaStats> {
    meta_stats_of(&catalog.mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorRule {
    Ellipsoid,
    L2,
}

impl std::fmt::Display for SelectorRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SelectorRule::Ellipsoid => "ellipsoid",
            SelectorRule::L2 => "l2",
        })
    }
}

impl std::str::FromStr for SelectorRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ellipsoid" => Ok(SelectorRule::Ellipsoid),
            "l2" => Ok(SelectorRule::L2),
            other => Err(Error::config(format!(
                "unknown selector '{other}' (expected ellipsoid|l2|none)"
            ))),
        }
    }
}

/// The selected outskirt distributions: indices into the catalog plus
/// everything needed to re-check membership (rule, alpha, stats).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OutskirtSet {
    pub indices: Vec<usize>,
    pub rule: SelectorRule,
    pub alpha: f64,
    pub stats: MetaStats,
}

fn ellipsoid_member(mu_row: &[f64], stats: &MetaStats, alpha: f64) -> bool {
    let mut score = 0.0f64;
    for ((&m, &c), &v) in mu_row.iter().zip(&stats.mu_bar).zip(&stats.sigma_bar_sq) {
        score += (m - c) * (m - c) / (alpha * v);
    }
    score >= 1.0
}

fn l2_member(mu_row: &[f64], stats: &MetaStats, alpha: f64) -> bool {
    let norm = mu_row.iter().map(|v| v * v).sum::<f64>().sqrt();
    (norm - stats.mu_bar_l2).abs() >= alpha * stats.sigma_bar_l2
}

/// Select outskirt rows of a mean matrix (catalog `mu`s, or plain codes for
/// the non-variational ablations). An empty selection is an error: it means
/// alpha is too large for this catalog.
pub fn select_outskirts_of(
    mu: &Array2<f64>,
    stats: &MetaStats,
    rule: SelectorRule,
    alpha: f64,
) -> Result<OutskirtSet> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::config(format!("alpha must be > 0, got {alpha}")));
    }
    if mu.ncols() != stats.mu_bar.len() {
        return Err(Error::numeric(
            "meta statistics dimension does not match the catalog",
        ));
    }
    let mu = mu.as_standard_layout();
    let indices: Vec<usize> = mu
        .rows()
        .into_iter()
        .enumerate()
        .filter(|(_, row)| {
            let row = row.as_slice().expect("standard layout rows are contiguous");
            match rule {
                SelectorRule::Ellipsoid => ellipsoid_member(row, stats, alpha),
                SelectorRule::L2 => l2_member(row, stats, alpha),
            }
        })
        .map(|(i, _)| i)
        .collect();
    if indices.is_empty() {
        return Err(Error::data(format!(
            "empty outskirt set: no distribution satisfies the {rule} rule at alpha={alpha}; \
             lower alpha"
        )));
    }
    Ok(OutskirtSet {
        indices,
        rule,
        alpha,
        stats: stats.clone(),
    })
}

pub fn select_outskirts(
    catalog: &LatentCatalog,
    stats: &MetaStats,
    rule: SelectorRule,
    alpha: f64,
) -> Result<OutskirtSet> {
    select_outskirts_of(&catalog.mu, stats, rule, alpha)
}

/// The per-dimension outward sign vector: `+1` where `mu_d >= mu_bar_d`,
/// `-1` otherwise (ties break to `+1`).
pub fn direction_signs(mu_row: &[f64], stats: &MetaStats) -> Vec<f64> {
    mu_row
        .iter()
        .zip(&stats.mu_bar)
        .map(|(&m, &c)| if m >= c { 1.0 } else { -1.0 })
        .collect()
}

/// How the per-dimension noise factor `eps` is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsMode {
    /// `eps_d = |N(0, 1)|` (half-normal).
    HalfNormal,
    /// `eps_d = 1` exactly; sources cycle through the outskirt set in order,
    /// so the output does not depend on the seed at all.
    Deterministic,
}

/// Synthesis settings: magnitude, noise mode, how many samples, and the
/// master seed the per-sample substreams are derived from.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthesisConfig {
    pub beta: f64,
    pub noise: EpsMode,
    pub count: usize,
    pub seed: u64,
}

/// Synthetic outliers plus the catalog index each one was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub samples: Array2<f64>,
    pub sources: Vec<usize>,
}

/// Directional synthesis from the outskirt distributions.
pub fn synthesize(
    catalog: &LatentCatalog,
    outskirts: &OutskirtSet,
    cfg: &SynthesisConfig,
) -> Result<Synthesis> {
    if !(cfg.beta.is_finite() && cfg.beta > 0.0) {
        return Err(Error::config(format!("beta must be > 0, got {}", cfg.beta)));
    }
    if cfg.count == 0 {
        return Err(Error::config("synthesis count must be >= 1"));
    }
    if outskirts.indices.is_empty() {
        return Err(Error::data(
            "empty outskirt set: no distributions to synthesize from",
        ));
    }
    if let Some(&bad) = outskirts.indices.iter().find(|&&i| i >= catalog.len()) {
        return Err(Error::numeric(format!(
            "outskirt index {bad} out of catalog range {}",
            catalog.len()
        )));
    }
    let stats = &outskirts.stats;
    if stats.mu_bar.len() != catalog.dim() {
        return Err(Error::numeric(
            "outskirt statistics dimension does not match the catalog",
        ));
    }
    let d = catalog.dim();
    let k = outskirts.indices.len();

    let rows: Vec<(usize, Vec<f64>)> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let (src, eps): (usize, Option<Vec<f64>>) = match cfg.noise {
                EpsMode::HalfNormal => {
                    let mut r = rng::stream_indexed(cfg.seed, "synthesis", i as u64);
                    let src = outskirts.indices[r.random_range(0..k)];
                    let eps = (0..d)
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(&mut r);
                            z.abs()
                        })
                        .collect();
                    (src, Some(eps))
                }
                EpsMode::Deterministic => (outskirts.indices[i % k], None),
            };
            let mu = catalog.mu.row(src);
            let sigma = catalog.sigma.row(src);
            let y = (0..d)
                .map(|dim| {
                    let e = eps.as_ref().map_or(1.0, |v| v[dim]);
                    let s = if mu[dim] >= stats.mu_bar[dim] { 1.0 } else { -1.0 };
                    mu[dim] + cfg.beta * s * sigma[dim] * e
                })
                .collect();
            (src, y)
        })
        .collect();

    let mut samples = Array2::zeros((cfg.count, d));
    let mut sources = Vec::with_capacity(cfg.count);
    for (i, (src, y)) in rows.into_iter().enumerate() {
        samples.row_mut(i).assign(&ndarray::ArrayView1::from(&y[..]));
        sources.push(src);
    }
    Ok(Synthesis { samples, sources })
}

/// Jitter baseline: perturb each given representation row with isotropic
/// Gaussian noise of standard deviation `noise_sigma` (no directional push).
/// `noise_sigma = 0` is the identity. One output row per input row; row `i`
/// uses its own counter-indexed substream.
pub fn jitter_ae_space(
    codes: &Array2<f64>,
    noise_sigma: f64,
    master_seed: u64,
) -> Result<Array2<f64>> {
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(Error::config(format!(
            "jitter noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    if noise_sigma == 0.0 {
        return Ok(codes.clone());
    }
    let d = codes.ncols();
    let rows: Vec<Vec<f64>> = (0..codes.nrows())
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream_indexed(master_seed, "jitter", i as u64);
            let base = codes.row(i);
            (0..d)
                .map(|dim| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    base[dim] + noise_sigma * z
                })
                .collect()
        })
        .collect();
    let mut out = Array2::zeros(codes.raw_dim());
    for (i, y) in rows.into_iter().enumerate() {
        out.row_mut(i).assign(&ndarray::ArrayView1::from(&y[..]));
    }
    Ok(out)
}

/// Resample `count` rows uniformly with replacement from `subset` and apply
/// jitter noise to each. Used by the AE-space ablation to reach the
/// configured synthetic count.
pub fn synthesize_jitter(
    reps: &Array2<f64>,
    subset: &[usize],
    noise_sigma: f64,
    count: usize,
    master_seed: u64,
) -> Result<Synthesis> {
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(Error::config(format!(
            "jitter noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    if count == 0 {
        return Err(Error::config("synthesis count must be >= 1"));
    }
    if subset.is_empty() {
        return Err(Error::data("empty subset: nothing to jitter"));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= reps.nrows()) {
        return Err(Error::numeric(format!(
            "jitter index {bad} out of range {}",
            reps.nrows()
        )));
    }
    let d = reps.ncols();
    let k = subset.len();
    let rows: Vec<(usize, Vec<f64>)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream_indexed(master_seed, "synthesis", i as u64);
            let src = subset[r.random_range(0..k)];
            let base = reps.row(src);
            let y = (0..d)
                .map(|dim| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    base[dim] + noise_sigma * z
                })
                .collect();
            (src, y)
        })
        .collect();
    let mut samples = Array2::zeros((count, d));
    let mut sources = Vec::with_capacity(count);
    for (i, (src, y)) in rows.into_iter().enumerate() {
        samples.row_mut(i).assign(&ndarray::ArrayView1::from(&y[..]));
        sources.push(src);
    }
    Ok(Synthesis { samples, sources })
}

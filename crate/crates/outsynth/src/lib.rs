//! Zero-shot anomaly detection by synthesizing outliers from the latent
//! distribution of inliers.
//!
//! The pipeline has four stages:
//!
//! 1. [`features`] extracts per-image descriptors (HoG, LBP, raw pixels).
//! 2. [`hierarchy`] trains one denoising autoencoder per descriptor, fuses the
//!    codes into a vector `w`, and trains a variational autoencoder whose
//!    Gaussian head maps every training inlier to a latent distribution
//!    `(mu, sigma)`. The collection of those distributions is the catalog `Q`.
//! 3. [`boundary`] selects the "outskirt" distributions of `Q` (the ones far
//!    from the catalog mean) and synthesizes artificial outliers by pushing
//!    samples outward along the per-dimension direction away from the mean.
//! 4. [`classify`] trains a binary classifier on inlier latent means vs. the
//!    synthetic outliers; [`metrics`] scores it with ROC-AUC / F1 under
//!    k-fold cross-validation.
//!
//! No real outlier is ever seen during training: true outliers only appear in
//! the evaluation split, which [`pipeline`] enforces with an audit assertion.

pub mod boundary;
pub mod classify;
pub mod data;
pub mod error;
pub mod features;
pub mod hierarchy;
pub mod metrics;
pub mod nnet;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};

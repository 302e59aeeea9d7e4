//! Synthetic Gaussian blob datasets for pipeline tests and ablations.
//!
//! Inliers are standard normal around the origin; outliers are standard
//! normal around `separation * u` for a single random unit direction `u`.
//! Everything is drawn from named substreams of the dataset seed, so a
//! `BlobsParams` value identifies one dataset exactly.

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlobsParams {
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub dim: usize,
    pub separation: f64,
    pub seed: u64,
}

impl Default for BlobsParams {
    fn default() -> Self {
        BlobsParams {
            n_inliers: 400,
            n_outliers: 400,
            dim: 16,
            separation: 6.0,
            seed: 0,
        }
    }
}

/// Returns `(inliers, outliers)` with shapes `[n_inliers, dim]` and
/// `[n_outliers, dim]`.
pub fn make_blobs(params: &BlobsParams) -> Result<(Array2<f64>, Array2<f64>)> {
    if params.n_inliers == 0 || params.n_outliers == 0 {
        return Err(Error::config("blobs: need at least one sample per class"));
    }
    if params.dim == 0 {
        return Err(Error::config("blobs: dim must be >= 1"));
    }
    if !(params.separation.is_finite() && params.separation >= 0.0) {
        return Err(Error::config("blobs: separation must be finite and >= 0"));
    }

    let mut dir_rng = rng::stream(params.seed, "blobs-direction");
    let mut u: Vec<f64> = (0..params.dim)
        .map(|_| StandardNormal.sample(&mut dir_rng))
        .collect();
    let norm: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    // A standard normal vector is zero with probability zero, but guard the
    // division anyway.
    if norm < 1e-12 {
        u = std::iter::once(1.0)
            .chain(std::iter::repeat(0.0))
            .take(params.dim)
            .collect();
    } else {
        u.iter_mut().for_each(|v| *v /= norm);
    }

    let mut in_rng = rng::stream(params.seed, "blobs-inliers");
    let inliers = Array2::from_shape_fn((params.n_inliers, params.dim), |_| {
        StandardNormal.sample(&mut in_rng)
    });
    let mut out_rng = rng::stream(params.seed, "blobs-outliers");
    let outliers = Array2::from_shape_fn((params.n_outliers, params.dim), |(_, d)| {
        let noise: f64 = StandardNormal.sample(&mut out_rng);
        params.separation * u[d] + noise
    });
    Ok((inliers, outliers))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_determinism() {
        let p = BlobsParams {
            n_inliers: 50,
            n_outliers: 30,
            dim: 4,
            separation: 5.0,
            seed: 3,
        };
        let (a_in, a_out) = make_blobs(&p).unwrap();
        let (b_in, b_out) = make_blobs(&p).unwrap();
        assert_eq!(a_in.dim(), (50, 4));
        assert_eq!(a_out.dim(), (30, 4));
        assert_eq!(a_in, b_in);
        assert_eq!(a_out, b_out);
        let (c_in, _) = make_blobs(&BlobsParams { seed: 4, ..p }).unwrap();
        assert_ne!(a_in, c_in);
    }

    #[test]
    fn separation_moves_the_outlier_mean() {
        let p = BlobsParams {
            n_inliers: 2000,
            n_outliers: 2000,
            dim: 8,
            separation: 10.0,
            seed: 1,
        };
        let (inliers, outliers) = make_blobs(&p).unwrap();
        let mean_norm = |m: &Array2<f64>| {
            let mean = m.mean_axis(ndarray::Axis(0)).unwrap();
            mean.iter().map(|v| v * v).sum::<f64>().sqrt()
        };
        // Inlier centroid near the origin, outlier centroid near distance 10.
        assert!(mean_norm(&inliers) < 0.2, "{}", mean_norm(&inliers));
        assert!((mean_norm(&outliers) - 10.0).abs() < 0.3, "{}", mean_norm(&outliers));
    }

    #[test]
    fn rejects_degenerate_params() {
        assert!(make_blobs(&BlobsParams {
            n_inliers: 0,
            ..Default::default()
        })
        .is_err());
        assert!(make_blobs(&BlobsParams {
            dim: 0,
            ..Default::default()
        })
        .is_err());
        assert!(make_blobs(&BlobsParams {
            separation: f64::NAN,
            ..Default::default()
        })
        .is_err());
    }
}

//! Image descriptors: histogram of oriented gradients, local binary
//! patterns, and raw pixels.
//!
//! All descriptors consume grayscale images with intensities in `[0, 1]` and
//! produce fixed-length `f64` vectors; for a given parameter set every image
//! of the same shape yields the same output length, which the autoencoder
//! stage relies on.

mod hog;
mod lbp;

pub use hog::{hog, HogParams};
pub use lbp::{lbp, LbpMethod, LbpParams};

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Grayscale image, row-major, intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::data("image dimensions must be nonzero"));
        }
        if data.len() != height * width {
            return Err(Error::data(format!(
                "image data length {} does not match {height}x{width}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("image contains non-finite pixels"));
        }
        Ok(GrayImage {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        debug_assert!(y < self.height && x < self.width);
        self.data[y * self.width + x]
    }

    /// Pixel access with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_replicated(&self, y: isize, x: isize) -> f64 {
        let y = y.clamp(0, self.height as isize - 1) as usize;
        let x = x.clamp(0, self.width as isize - 1) as usize;
        self.get(y, x)
    }
}

/// A descriptor choice with its parameters. The canonical fusion order is the
/// declaration order of this enum: HoG, then LBP, then raw.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    Hog(HogParams),
    Lbp(LbpParams),
    Raw,
}

impl FeatureKind {
    /// Stable rank used to canonicalize fusion order.
    pub fn rank(&self) -> usize {
        match self {
            FeatureKind::Hog(_) => 0,
            FeatureKind::Lbp(_) => 1,
            FeatureKind::Raw => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeatureKind::Hog(_) => "hog",
            FeatureKind::Lbp(_) => "lbp",
            FeatureKind::Raw => "raw",
        }
    }

    /// Descriptor length for images of the given shape.
    pub fn output_len(&self, height: usize, width: usize) -> Result<usize> {
        match self {
            FeatureKind::Hog(p) => p.output_len(height, width),
            FeatureKind::Lbp(p) => p.output_len(height, width),
            FeatureKind::Raw => Ok(height * width),
        }
    }

    pub fn extract(&self, image: &GrayImage) -> Result<Vec<f64>> {
        match self {
            FeatureKind::Hog(p) => hog(image, p),
            FeatureKind::Lbp(p) => lbp(image, p),
            FeatureKind::Raw => Ok(image.pixels().to_vec()),
        }
    }
}

/// Extract one feature matrix per descriptor; row `i` of every matrix belongs
/// to `images[i]`. Parallel over images, order-stable.
pub fn extract_features(images: &[GrayImage], kinds: &[FeatureKind]) -> Result<Vec<Array2<f64>>> {
    if images.is_empty() {
        return Err(Error::data("no images to extract features from"));
    }
    if kinds.is_empty() {
        return Err(Error::config("no feature kinds configured"));
    }
    let (h, w) = (images[0].height(), images[0].width());
    if let Some(bad) = images.iter().find(|im| im.height() != h || im.width() != w) {
        return Err(Error::data(format!(
            "all images must share one shape; expected {h}x{w}, found {}x{}",
            bad.height(),
            bad.width()
        )));
    }
    kinds
        .iter()
        .map(|kind| {
            let dim = kind.output_len(h, w)?;
            let rows: Vec<Vec<f64>> = images
                .par_iter()
                .map(|im| kind.extract(im))
                .collect::<Result<_>>()?;
            let mut m = Array2::zeros((images.len(), dim));
            for (i, row) in rows.into_iter().enumerate() {
                debug_assert_eq!(row.len(), dim);
                m.row_mut(i).assign(&ndarray::ArrayView1::from(&row));
            }
            Ok(m)
        })
        .collect()
}

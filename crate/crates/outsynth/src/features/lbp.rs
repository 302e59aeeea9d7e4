//! Local binary patterns over a circular neighborhood.
//!
//! Pinned algorithm:
//!
//! * `points` samples on a circle of radius `radius`, at angles
//!   `2*pi*p/points`, sampled with bilinear interpolation.
//! * Bit `p` is 1 when `neighbor >= center` (ties count as 1).
//! * Only pixels whose full circle lies inside the image contribute; if no
//!   pixel qualifies the image is too small for the radius and that is a
//!   config error.
//! * `uniform`: patterns with at most two circular 0/1 transitions map to
//!   their popcount (bins `0..=points`), all others to one extra bin, giving
//!   `points + 2` bins.
//! * `var`: the population variance of the neighbor samples, histogrammed
//!   into 16 equal bins over `[0, 0.25)` (the variance of `[0,1]`-valued
//!   data cannot exceed 0.25; values at or above the top edge land in the
//!   last bin).
//! * The histogram is normalized to sum to 1.

use super::GrayImage;
use crate::error::{Error, Result};

pub const VAR_BINS: usize = 16;
pub const VAR_RANGE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LbpMethod {
    Uniform,
    Var,
}

impl std::str::FromStr for LbpMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(LbpMethod::Uniform),
            "var" => Ok(LbpMethod::Var),
            other => Err(Error::config(format!(
                "unknown lbp method '{other}' (expected uniform|var)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LbpParams {
    pub method: LbpMethod,
    pub points: usize,
    pub radius: f64,
}

impl Default for LbpParams {
    fn default() -> Self {
        LbpParams {
            method: LbpMethod::Uniform,
            points: 4,
            radius: 8.0,
        }
    }
}

impl LbpParams {
    fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::config("lbp: points must be >= 1"));
        }
        if self.points > 63 {
            return Err(Error::config("lbp: points must be <= 63"));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::config("lbp: radius must be > 0"));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        match self.method {
            LbpMethod::Uniform => self.points + 2,
            LbpMethod::Var => VAR_BINS,
        }
    }

    pub fn output_len(&self, height: usize, width: usize) -> Result<usize> {
        self.validate()?;
        let margin = self.radius.ceil() as usize;
        if height <= 2 * margin || width <= 2 * margin {
            return Err(Error::config(format!(
                "lbp: radius {} leaves no valid pixels in a {height}x{width} image",
                self.radius
            )));
        }
        Ok(self.n_bins())
    }
}

/// Bilinear interpolation at fractional coordinates; out-of-range support
/// pixels are clamped to the border (only reachable with zero weight for the
/// valid centers this module visits, but clamping keeps indexing safe).
fn sample_bilinear(image: &GrayImage, y: f64, x: f64) -> f64 {
    let y0 = y.floor();
    let x0 = x.floor();
    let fy = y - y0;
    let fx = x - x0;
    let y0 = y0 as isize;
    let x0 = x0 as isize;
    let v00 = image.get_replicated(y0, x0);
    let v01 = image.get_replicated(y0, x0 + 1);
    let v10 = image.get_replicated(y0 + 1, x0);
    let v11 = image.get_replicated(y0 + 1, x0 + 1);
    v00 * (1.0 - fy) * (1.0 - fx) + v01 * (1.0 - fy) * fx + v10 * fy * (1.0 - fx) + v11 * fy * fx
}

/// Circular 0/1 transition count of the length-`points` bit pattern.
fn transitions(pattern: u64, points: usize) -> u32 {
    let rotated = (pattern >> 1) | ((pattern & 1) << (points - 1));
    (pattern ^ rotated).count_ones()
}

pub fn lbp(image: &GrayImage, params: &LbpParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n_bins = params.output_len(image.height(), image.width())?;
    let margin = params.radius.ceil() as usize;
    let (h, w) = (image.height(), image.width());

    let offsets: Vec<(f64, f64)> = (0..params.points)
        .map(|p| {
            let angle = 2.0 * std::f64::consts::PI * p as f64 / params.points as f64;
            // (dy, dx); y grows downward, so -sin keeps the walk counterclockwise.
            (-params.radius * angle.sin(), params.radius * angle.cos())
        })
        .collect();

    let mut hist = vec![0.0f64; n_bins];
    let mut n_valid = 0usize;
    let mut neighbors = vec![0.0f64; params.points];
    for y in margin..h - margin {
        for x in margin..w - margin {
            let center = image.get(y, x);
            for (p, &(dy, dx)) in offsets.iter().enumerate() {
                neighbors[p] = sample_bilinear(image, y as f64 + dy, x as f64 + dx);
            }
            let bin = match params.method {
                LbpMethod::Uniform => {
                    let mut pattern: u64 = 0;
                    for (p, &v) in neighbors.iter().enumerate() {
                        if v >= center {
                            pattern |= 1 << p;
                        }
                    }
                    if transitions(pattern, params.points) <= 2 {
                        pattern.count_ones() as usize
                    } else {
                        params.points + 1
                    }
                }
                LbpMethod::Var => {
                    let mean: f64 = neighbors.iter().sum::<f64>() / params.points as f64;
                    let var: f64 = neighbors.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                        / params.points as f64;
                    ((var / VAR_RANGE * VAR_BINS as f64) as usize).min(VAR_BINS - 1)
                }
            };
            hist[bin] += 1.0;
            n_valid += 1;
        }
    }
    debug_assert!(n_valid > 0, "validated by output_len");
    for v in &mut hist {
        *v /= n_valid as f64;
    }
    Ok(hist)
}

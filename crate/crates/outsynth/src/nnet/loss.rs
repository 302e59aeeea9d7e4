//! Loss functions, mean-reduced over every element of the batch.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Predictions are clamped to `[BCE_CLAMP, 1 - BCE_CLAMP]` inside the binary
/// cross-entropy so saturated sigmoids cannot produce infinite losses.
pub const BCE_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    Mse,
    Bce,
}

impl Loss {
    /// Mean loss over all `n * d` elements.
    pub fn value(&self, pred: &Array2<f64>, target: &Array2<f64>) -> Result<f64> {
        check_shapes(pred, target)?;
        let count = pred.len() as f64;
        let sum = match self {
            Loss::Mse => ndarray::Zip::from(pred)
                .and(target)
                .fold(0.0, |acc, &p, &t| {
                    let e = p - t;
                    acc + e * e
                }),
            Loss::Bce => ndarray::Zip::from(pred)
                .and(target)
                .fold(0.0, |acc, &p, &t| {
                    let p = p.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
                    acc - t * p.ln() - (1.0 - t) * (1.0 - p).ln()
                }),
        };
        Ok(sum / count)
    }

    /// `dL/d(pred)`, including the mean-reduction factor. For BCE the clamp is
    /// differentiated honestly: predictions outside the clamp range get zero
    /// gradient, matching the loss actually computed by `value`.
    pub fn grad(&self, pred: &Array2<f64>, target: &Array2<f64>) -> Result<Array2<f64>> {
        check_shapes(pred, target)?;
        let scale = 1.0 / pred.len() as f64;
        let mut g = Array2::zeros(pred.raw_dim());
        match self {
            Loss::Mse => {
                ndarray::Zip::from(&mut g)
                    .and(pred)
                    .and(target)
                    .for_each(|g, &p, &t| *g = 2.0 * (p - t) * scale);
            }
            Loss::Bce => {
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
        Ok(g)
    }
}

impl std::str::FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mse" => Ok(Loss::Mse),
            "bce" => Ok(Loss::Bce),
            other => Err(Error::config(format!(
                "unknown loss '{other}' (expected mse|bce)"
            ))),
        }
    }
}

fn check_shapes(pred: &Array2<f64>, target: &Array2<f64>) -> Result<()> {
    if pred.dim() != target.dim() {
        return Err(Error::numeric(format!(
            "loss shape mismatch: pred {:?} vs target {:?}",
            pred.dim(),
            target.dim()
        )));
    }
    if pred.is_empty() {
        return Err(Error::numeric("loss over an empty batch"));
    }
    Ok(())
}

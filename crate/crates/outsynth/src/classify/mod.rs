//! Binary classifiers over the latent space: inlier means are the positive
//! class, synthesized outliers the negative class. A one-class SVM baseline
//! covers configurations that run without synthesis.
//!
//! All classifiers expose a continuous `decision_score` (higher = more
//! inlier-like, `> 0` predicts inlier) which feeds the ROC computation.

pub mod mlp;
pub mod nb;
pub mod oneclass;
pub mod svm;

pub use mlp::{mlp_fit, mlp_net, MlpClassifier, MlpParams};
pub use nb::{nb_fit, GaussianNb, NbParams, NB_VAR_FLOOR};
pub use oneclass::{one_class_fit, OneClassParams, OneClassSvm};
pub use svm::{svm_fit, Kernel, SvmModel, SvmParams};

use ndarray::Array2;

use crate::error::{Error, Result};

/// The SVM hyperparameter ranges exposed to tuning, mirroring the appendix
/// grids: gamma from 1 down to 1e-5 by decades, C from 1e-3 up to 10.
pub fn svm_gamma_grid() -> Vec<f64> {
    vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
}

pub fn svm_c_grid() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1, 1.0, 10.0]
}

/// Which classifier to train, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierSpec {
    Svm(SvmParams),
    NaiveBayes(NbParams),
    Mlp(MlpParams),
    OneClass(OneClassParams),
}

impl ClassifierSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierSpec::Svm(_) => "svm",
            ClassifierSpec::NaiveBayes(_) => "nb",
            ClassifierSpec::Mlp(_) => "mlp",
            ClassifierSpec::OneClass(_) => "one_class",
        }
    }

    pub fn is_one_class(&self) -> bool {
        matches!(self, ClassifierSpec::OneClass(_))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierSpec::Svm(p) => p.validate(),
            ClassifierSpec::NaiveBayes(p) => {
                if !(p.var_floor.is_finite() && p.var_floor > 0.0) {
                    return Err(Error::config("nb variance floor must be > 0"));
                }
                Ok(())
            }
            ClassifierSpec::Mlp(p) => p.validate(),
            ClassifierSpec::OneClass(p) => p.validate(),
        }
    }
}

/// A trained classifier of any kind.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedClassifier {
    Svm(SvmModel),
    NaiveBayes(GaussianNb),
    Mlp(MlpClassifier),
    OneClass(OneClassSvm),
}

impl TrainedClassifier {
    pub fn name(&self) -> &'static str {
        match self {
            TrainedClassifier::Svm(_) => "svm",
            TrainedClassifier::NaiveBayes(_) => "nb",
            TrainedClassifier::Mlp(_) => "mlp",
            TrainedClassifier::OneClass(_) => "one_class",
        }
    }

    pub fn decision_score(&self, x: &[f64]) -> f64 {
        match self {
            TrainedClassifier::Svm(m) => m.decision_score(x),
            TrainedClassifier::NaiveBayes(m) => m.decision_score(x),
            TrainedClassifier::Mlp(m) => m.decision_score(x),
            TrainedClassifier::OneClass(m) => m.decision_score(x),
        }
    }

    pub fn decision_scores(&self, x: &Array2<f64>) -> Vec<f64> {
        let x = x.as_standard_layout();
        x.rows()
            .into_iter()
            .map(|r| self.decision_score(r.as_slice().expect("standard layout rows are contiguous")))
            .collect()
    }

    /// Whether the underlying solver reached its stopping tolerance (always
    /// true for closed-form and fixed-epoch models).
    pub fn converged(&self) -> bool {
        match self {
            TrainedClassifier::Svm(m) => m.converged,
            TrainedClassifier::OneClass(m) => m.converged,
            _ => true,
        }
    }
}

/// Train the configured classifier. Binary classifiers require synthesized
/// negatives; the one-class baseline rejects them.
pub fn fit_classifier(
    spec: &ClassifierSpec,
    pos: &Array2<f64>,
    neg: Option<&Array2<f64>>,
    seed: u64,
) -> Result<TrainedClassifier> {
    spec.validate()?;
    match (spec, neg) {
        (ClassifierSpec::OneClass(p), None) => {
            Ok(TrainedClassifier::OneClass(one_class_fit(pos, p)?))
        }
        (ClassifierSpec::OneClass(_), Some(_)) => Err(Error::config(
            "one-class classifier takes no negative samples; disable synthesis or pick a binary classifier",
        )),
        (_, None) => Err(Error::config(format!(
            "classifier '{}' needs synthesized negatives; with synthesis=none use the one-class baseline",
            spec.name()
        ))),
        (ClassifierSpec::Svm(p), Some(neg)) => Ok(TrainedClassifier::Svm(svm_fit(pos, neg, p)?)),
        (ClassifierSpec::NaiveBayes(p), Some(neg)) => {
            Ok(TrainedClassifier::NaiveBayes(nb_fit(pos, neg, p)?))
        }
        (ClassifierSpec::Mlp(p), Some(neg)) => {
            Ok(TrainedClassifier::Mlp(mlp_fit(pos, neg, p, seed)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn dispatcher_enforces_negative_sample_contract() {
        let pos = arr2(&[[1.0, 0.0], [1.2, 0.1], [0.9, -0.1]]);
        let neg = arr2(&[[-1.0, 0.0], [-1.2, 0.1]]);
        let svm_spec = ClassifierSpec::Svm(SvmParams {
            kernel: Kernel::Linear,
            ..SvmParams::default()
        });
        assert!(fit_classifier(&svm_spec, &pos, None, 0).is_err());
        assert!(fit_classifier(&svm_spec, &pos, Some(&neg), 0).is_ok());
        let oc_spec = ClassifierSpec::OneClass(OneClassParams::default());
        assert!(fit_classifier(&oc_spec, &pos, Some(&neg), 0).is_err());
        assert!(fit_classifier(&oc_spec, &pos, None, 0).is_ok());
    }

    #[test]
    fn every_kind_scores_through_the_common_interface() {
        let pos = arr2(&[[2.0, 0.0], [2.1, 0.2], [1.9, -0.2], [2.2, 0.1]]);
        let neg = arr2(&[[-2.0, 0.0], [-2.1, 0.2], [-1.9, -0.2], [-2.2, 0.1]]);
        let specs = [
            ClassifierSpec::Svm(SvmParams {
                kernel: Kernel::Linear,
                c: 1.0,
                ..SvmParams::default()
            }),
            ClassifierSpec::NaiveBayes(NbParams::default()),
            ClassifierSpec::Mlp(MlpParams::default()),
        ];
        for spec in &specs {
            let model = fit_classifier(spec, &pos, Some(&neg), 5).unwrap();
            assert!(model.converged(), "{}", spec.name());
            let s_pos = model.decision_score(&[2.0, 0.0]);
            let s_neg = model.decision_score(&[-2.0, 0.0]);
            assert!(
                s_pos > s_neg,
                "{}: inlier {s_pos} not above outlier {s_neg}",
                spec.name()
            );
            let scores = model.decision_scores(&pos);
            assert_eq!(scores.len(), 4);
        }
    }

    #[test]
    fn grids_match_documented_ranges() {
        assert_eq!(svm_gamma_grid().len(), 6);
        assert_eq!(svm_c_grid().len(), 5);
        assert_eq!(svm_gamma_grid()[0], 1.0);
        assert_eq!(svm_c_grid()[4], 10.0);
    }
}

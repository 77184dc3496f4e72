//! Pure statistical primitives.
//!
//! ROC/AUC via the rank statistic, informedness-optimal operating points,
//! piecewise-linear score calibration, ensemble averaging, Cohen's kappa,
//! confusion/F1 agreement tables, and Bland-Altman summaries. Every function
//! here is a pure function of its inputs and safe to call from any thread.

mod agreement;
mod bland_altman;
mod calibration;
mod kappa;
mod roc;

pub use agreement::{confusion_f1, AgreementTable};
pub use bland_altman::{bland_altman, BlandAltmanSummary};
pub use calibration::{calibrate, ensemble_calibrated};
pub use kappa::{cohen_kappa, KappaResult};
pub use roc::{auc, optimal_operating_point, roc_curve, OperatingPoint, RocCurve};

/// Errors raised by the statistical primitives.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    /// Labels contain only one class; the metric is undefined.
    #[error("labels contain a single class; metric undefined")]
    MissingClass,

    /// Paired inputs of different lengths.
    #[error("length mismatch: {left} vs {right}")]
    ShapeError { left: usize, right: usize },

    /// An operating point outside the open unit interval.
    #[error("operating point {opt} outside (0, 1)")]
    DegenerateOperatingPoint { opt: f64 },

    /// Ensemble with zero members.
    #[error("empty ensemble")]
    EmptyEnsemble,

    /// Too few samples for the statistic.
    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    /// Scores outside [0,1] or non-finite values.
    #[error("{0}")]
    InvalidInput(String),
}

pub(crate) fn check_scores(scores: &[f64]) -> Result<(), MetricError> {
    for &s in scores {
        if !s.is_finite() || !(0.0..=1.0).contains(&s) {
            return Err(MetricError::InvalidInput(format!(
                "score {s} outside the unit interval"
            )));
        }
    }
    Ok(())
}

pub(crate) fn check_same_len(a: usize, b: usize) -> Result<(), MetricError> {
    if a != b {
        return Err(MetricError::ShapeError { left: a, right: b });
    }
    Ok(())
}

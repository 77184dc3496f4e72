//! Cross-domain generalization audit toolkit.
//!
//! This crate ingests classifier scores, labels, and feature vectors from
//! multiple datasets and models, and provides the statistical machinery to
//! audit how well the models generalize across domains: per-test-set
//! calibration, cross-domain AUC matrices, leave-one-domain-out summaries,
//! inter-model agreement (Cohen's kappa, confusion/F1, Bland-Altman), and a
//! regularized linear representation probe over shared feature vectors.
//!
//! A synthetic cohort generator ([`synth`]) produces desk-scale studies with
//! controllable covariate, prior, and concept shift so that every analysis in
//! the crate can be exercised against planted ground truth.

pub mod data;
pub mod metrics;
pub mod probe;
pub mod protocols;
pub mod synth;

mod util;

pub use data::{
    FeatureSet, Label, LabelMap, LabelSet, PredictionSet, StudyManifest, TaskVocabulary,
    UncertainPolicy,
};
pub use metrics::{
    AgreementTable, BlandAltmanSummary, KappaResult, OperatingPoint, RocCurve,
};
pub use protocols::{LooReport, MatrixReport};

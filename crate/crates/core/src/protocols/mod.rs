//! Experiment protocols over studies.
//!
//! Cross-domain AUC matrices, leave-one-domain-out summaries, pairwise kappa
//! matrices, seed agreement, relabeling agreement, and disagreement-case
//! mining. Cells are computed independently (and may run in parallel) and
//! assembled in sorted-key order, so reports do not depend on scheduling.

mod disagreement;
mod ensemble;
mod kappa_matrix;
mod loo;
mod matrix;
mod relabel;
mod seed_agreement;

pub use disagreement::{mine_disagreements, Direction, DisagreementCase, LabelFilter};
pub use ensemble::{auc_cell, calibrated_model_scores, CellSkip, MembersMode};
pub use kappa_matrix::kappa_matrix;
pub use loo::{loo_summary, LooCondition, LooConditionStats, LooReport, LooTestSet};
pub use matrix::MatrixReport;
pub use relabel::{rater_disagreement, relabel_agreement, RaterRow, TaskPairing};
pub use seed_agreement::seed_agreement;

use crate::data::Study;

/// Errors raised by the protocol layer.
#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    /// Every cell of a requested matrix is empty.
    #[error("no valid cells: {0}")]
    NoValidCells(String),

    /// Not enough overlapping data for the analysis.
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Metric(#[from] crate::metrics::MetricError),
}

/// Cross-domain AUC matrix: one row per model, one column per (task, test
/// dataset) pair, cells carrying the ensemble-calibrated AUC.
///
/// For each cell the model's ensemble members are calibrated per (member,
/// task, test-set) operating point, their calibrated outputs averaged, and
/// AUC computed once on the ensemble score. Cells whose preconditions fail
/// (missing head, missing task, single-class labels) are EMPTY with the
/// reason recorded.
pub fn auc_matrix(study: &Study) -> Result<MatrixReport, ProtocolError> {
    ensemble::auc_matrix(study)
}

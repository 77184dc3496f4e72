//! Canonical data model and manifest-driven ingestion.
//!
//! Everything downstream (metrics, protocols, the probe) operates on the
//! types defined here: tri-state label sets, score matrices with availability
//! masks, shared feature vectors, and the study manifest that ties the files
//! of a study together. All types are immutable after construction and keep
//! their samples sorted lexicographically by `sample_id`, so derived reports
//! are byte-reproducible.

mod align;
mod features;
mod harmonize;
pub(crate) mod io;
mod label_map;
mod labels;
mod manifest;
mod predictions;
mod vocab;

pub use align::{align_ids, align_samples, AlignedPairs};
pub use features::FeatureSet;
pub use harmonize::{harmonize_labels, RawLabelRow, RawLabelTable, RawState};
pub use io::{
    read_feature_csv, read_label_csv, read_prediction_csv, read_raw_label_csv,
    read_raw_label_table, write_feature_csv, write_label_csv, write_prediction_csv,
};
pub use label_map::LabelMap;
pub use labels::{dataset_counts, Label, LabelSet, TaskCounts};
pub use manifest::{FeatureSource, LabelSource, PredictionSource, Study, StudyManifest};
pub use predictions::PredictionSet;
pub use vocab::TaskVocabulary;

use serde::{Deserialize, Serialize};

/// Policy for uncertain source labels (the `U` state in label CSVs).
///
/// The default maps uncertain to missing; the choice is recorded in every
/// report header so results are interpretable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UncertainPolicy {
    #[default]
    Missing,
    Pos,
    Neg,
}

impl UncertainPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            UncertainPolicy::Missing => "missing",
            UncertainPolicy::Pos => "pos",
            UncertainPolicy::Neg => "neg",
        }
    }
}

impl std::str::FromStr for UncertainPolicy {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "missing" => Ok(UncertainPolicy::Missing),
            "pos" => Ok(UncertainPolicy::Pos),
            "neg" => Ok(UncertainPolicy::Neg),
            other => Err(DataError::Invalid(format!(
                "unknown uncertain policy {other:?} (expected missing|pos|neg)"
            ))),
        }
    }
}

/// Errors raised while constructing or ingesting the data model.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    /// A raw source label has no mapping, no hierarchy parent, and no ignore rule.
    #[error("unknown raw label {label:?} in dataset {dataset:?}: no mapping or ignore rule")]
    Harmonization { dataset: String, label: String },

    /// The label hierarchy contains a cycle reachable from `label`.
    #[error("label hierarchy cycle detected at {label:?}")]
    Cycle { label: String },

    /// A mapping target is not a task of the study vocabulary.
    #[error("mapping target {task:?} is not in the task vocabulary")]
    UnknownTask { task: String },

    /// Structure violations: duplicate ids, shape mismatches, bad identifiers.
    #[error("{0}")]
    Invalid(String),

    /// Non-finite feature values or out-of-range scores.
    #[error("{0}")]
    Value(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

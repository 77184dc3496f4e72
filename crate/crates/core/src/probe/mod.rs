//! Linear representation probe over shared feature vectors.
//!
//! One sigmoid head per (dataset, task) pair is trained on fixed input
//! features with a frequency-balanced, masked cross-entropy loss; during
//! training each head only receives gradient from samples of its own
//! dataset. An optional L2 alignment regularizer pulls the weight vectors of
//! the same task toward their task centroid. Analysis operations compare the
//! resulting weight vectors: PCA projection, per-task distance summaries, and
//! the distance-vs-generalization rank correlation.

mod distance;
mod model;
mod objective;
mod pca;
mod similarity;
mod task_weights;
mod train;

pub use distance::{weight_distance_summary, DistanceSummary};
pub use model::{ProbeConfig, ProbeModel};
pub use objective::{probe_objective, Objective, ProbeGradient};
pub use pca::{pca_project, ProjectionResult};
pub use similarity::{similarity_vs_generalization, CorrelationReport};
pub use task_weights::{task_weights, TaskWeights};
pub use train::{train_probe, TracePoint, TrainingTrace};

/// Errors raised by probe construction, training, and analysis.
#[derive(Debug, thiserror::Error)]
pub enum ProbeError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("bad data: {0}")]
    Data(String),

    #[error("training diverged at iteration {iteration}: loss is not finite")]
    Training { iteration: usize },

    #[error("need at least {required} overlapping tasks, got {got}")]
    InsufficientSamples { required: usize, got: usize },
}

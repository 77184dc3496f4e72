//! Synthetic multi-dataset cohort generator.
//!
//! Builds desk-scale studies with controllable covariate, prior, and concept
//! shift. Every sample carries a latent severity vector; per-dataset labelers
//! turn latents into tri-state labels through their own concept (a direction,
//! threshold offset, and flip rate), and per-model scorers emit monotone
//! noisy scores of their own concept. Outputs use the exact CSV/manifest
//! formats of the ingestion layer, so generated studies are
//! indistinguishable from ingested ones.

mod analytic;
mod config;
mod generate;
mod rng;
mod scenario;

pub use analytic::{flipped_auc, monotone_score_auc};
pub use config::{
    CohortConfig, ConceptSpec, DatasetSpec, FeatureSpec, LabelerSpec, RelabelSpec, ScorerSpec,
};
pub use generate::{generate_cohort, Cohort};
pub use scenario::{scenario, Scenario, ScenarioExpectations};

/// Errors raised by cohort configuration or generation.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid cohort config: {0}")]
    Invalid(String),

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error(transparent)]
    Data(#[from] crate::data::DataError),
}

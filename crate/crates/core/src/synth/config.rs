use super::ConfigError;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A direction in latent space defining what a labeler or scorer responds
/// to: a sparse unit vector over the latent dimensions (task dimensions
/// first, then auxiliary ones).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptSpec {
    /// (latent dimension, weight) pairs; normalized to unit length.
    pub axes: Vec<(usize, f64)>,
}

impl ConceptSpec {
    /// The canonical concept for task dimension `t`.
    pub fn axis(t: usize) -> Self {
        Self {
            axes: vec![(t, 1.0)],
        }
    }

    pub fn normalized(&self) -> Result<Vec<(usize, f64)>, ConfigError> {
        let norm: f64 = self.axes.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(ConfigError::Invalid(
                "concept must have a nonzero finite direction".into(),
            ));
        }
        Ok(self.axes.iter().map(|&(d, w)| (d, w / norm)).collect())
    }

    /// Projection of a latent vector onto the (normalized) concept.
    pub(crate) fn response(&self, latent: &[f64], normalized: &[(usize, f64)]) -> f64 {
        let _ = self;
        normalized.iter().map(|&(d, w)| w * latent[d]).sum()
    }
}

/// One synthetic dataset and its size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub id: String,
    pub size: usize,
}

/// How a dataset's labeler turns latents into labels: its concept per task,
/// decision threshold offset, and label flip rate. This is the concept
/// parameter distinguishing one annotation regime from another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelerSpec {
    /// Concept per task; tasks not listed use the task's own latent axis.
    #[serde(default)]
    pub concepts: BTreeMap<String, ConceptSpec>,
    /// Threshold offset per task (default 0): shifts prevalence and the
    /// concept boundary.
    #[serde(default)]
    pub threshold_offset: BTreeMap<String, f64>,
    /// Independent label flip probability per task (default 0).
    #[serde(default)]
    pub flip_rate: BTreeMap<String, f64>,
    /// Fraction of cells blanked to MISSING per task (default 0).
    #[serde(default)]
    pub missing_rate: BTreeMap<String, f64>,
}

impl Default for LabelerSpec {
    fn default() -> Self {
        Self {
            concepts: BTreeMap::new(),
            threshold_offset: BTreeMap::new(),
            flip_rate: BTreeMap::new(),
            missing_rate: BTreeMap::new(),
        }
    }
}

/// One scored model: training-domain composition, ensemble seeds, and the
/// per-task score noise describing its discriminative power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerSpec {
    pub model_id: String,
    pub train_domains: BTreeSet<String>,
    pub seeds: Vec<u64>,
    /// Score noise (sigma on the latent logit) on training domains.
    pub noise: f64,
    /// Score noise on datasets outside the training domains; `None` keeps
    /// the in-domain noise (no degradation).
    #[serde(default)]
    pub unseen_noise: Option<f64>,
    /// Fraction of the noise variance shared with other scorers on the same
    /// samples; near-duplicate models share most of it.
    #[serde(default)]
    pub shared_noise: f64,
    /// Concept per task; defaults to the task's own latent axis.
    #[serde(default)]
    pub concepts: BTreeMap<String, ConceptSpec>,
    /// Tasks the model emits; `None` = all cohort tasks.
    #[serde(default)]
    pub heads: Option<BTreeSet<String>>,
}

/// Feature emission: latent dimensions embedded into D coordinates plus
/// isotropic noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub dim: usize,
    /// Scale of the latent signal in the features.
    pub separation: f64,
    /// Isotropic Gaussian noise added to every coordinate.
    pub noise: f64,
}

/// Applies another labeler to an existing dataset's samples, emitting a
/// second label set over the same sample ids (a relabeling).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelabelSpec {
    pub source_dataset: String,
    pub new_dataset_id: String,
    pub labeler: LabelerSpec,
}

/// Full cohort description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortConfig {
    pub datasets: Vec<DatasetSpec>,
    pub tasks: Vec<String>,
    /// Auxiliary latent dimensions beyond the task axes, available to
    /// divergent concepts.
    #[serde(default)]
    pub aux_dims: usize,
    /// Labeler per dataset id; datasets not listed use the default labeler.
    #[serde(default)]
    pub labelers: BTreeMap<String, LabelerSpec>,
    pub scorers: Vec<ScorerSpec>,
    #[serde(default)]
    pub features: Option<FeatureSpec>,
    #[serde(default)]
    pub relabels: Vec<RelabelSpec>,
}

impl CohortConfig {
    pub fn latent_dims(&self) -> usize {
        self.tasks.len() + self.aux_dims
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.datasets.is_empty() || self.tasks.is_empty() {
            return Err(ConfigError::Invalid(
                "cohort needs at least one dataset and one task".into(),
            ));
        }
        for d in &self.datasets {
            if d.size == 0 {
                return Err(ConfigError::Invalid(format!(
                    "dataset {:?} has size 0",
                    d.id
                )));
            }
        }
        let dataset_ids: BTreeSet<&str> = self.datasets.iter().map(|d| d.id.as_str()).collect();
        if dataset_ids.len() != self.datasets.len() {
            return Err(ConfigError::Invalid("duplicate dataset id".into()));
        }
        let latent = self.latent_dims();
        let check_labeler = |spec: &LabelerSpec| -> Result<(), ConfigError> {
            for (task, c) in &spec.concepts {
                if !self.tasks.contains(task) {
                    return Err(ConfigError::Invalid(format!(
                        "labeler concept for unknown task {task:?}"
                    )));
                }
                for &(dim, _) in &c.axes {
                    if dim >= latent {
                        return Err(ConfigError::Invalid(format!(
                            "concept axis {dim} outside latent space of {latent}"
                        )));
                    }
                }
                c.normalized()?;
            }
            for rate in spec.flip_rate.values().chain(spec.missing_rate.values()) {
                if !(0.0..=1.0).contains(rate) {
                    return Err(ConfigError::Invalid(format!(
                        "rate {rate} outside [0,1]"
                    )));
                }
            }
            Ok(())
        };
        for (id, spec) in &self.labelers {
            if !dataset_ids.contains(id.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "labeler for unknown dataset {id:?}"
                )));
            }
            check_labeler(spec)?;
        }
        for r in &self.relabels {
            if !dataset_ids.contains(r.source_dataset.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "relabel source {:?} is not a dataset",
                    r.source_dataset
                )));
            }
            if dataset_ids.contains(r.new_dataset_id.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "relabel id {:?} collides with a dataset",
                    r.new_dataset_id
                )));
            }
            check_labeler(&r.labeler)?;
        }
        let mut model_ids = BTreeSet::new();
        for s in &self.scorers {
            if !model_ids.insert(&s.model_id) {
                return Err(ConfigError::Invalid(format!(
                    "duplicate model id {:?}",
                    s.model_id
                )));
            }
            if s.seeds.is_empty() {
                return Err(ConfigError::Invalid(format!(
                    "scorer {:?} has no seeds",
                    s.model_id
                )));
            }
            for d in &s.train_domains {
                if !dataset_ids.contains(d.as_str()) {
                    return Err(ConfigError::Invalid(format!(
                        "scorer {:?} references unknown dataset {d:?}",
                        s.model_id
                    )));
                }
            }
            if !(0.0..=1.0).contains(&s.shared_noise) {
                return Err(ConfigError::Invalid(format!(
                    "shared_noise {} outside [0,1]",
                    s.shared_noise
                )));
            }
            if s.noise < 0.0 || s.unseen_noise.is_some_and(|n| n < 0.0) {
                return Err(ConfigError::Invalid("negative score noise".into()));
            }
            for (task, c) in &s.concepts {
                if !self.tasks.contains(task) {
                    return Err(ConfigError::Invalid(format!(
                        "scorer concept for unknown task {task:?}"
                    )));
                }
                c.normalized()?;
            }
            if let Some(heads) = &s.heads {
                for h in heads {
                    if !self.tasks.contains(h) {
                        return Err(ConfigError::Invalid(format!(
                            "scorer head for unknown task {h:?}"
                        )));
                    }
                }
            }
        }
        if let Some(f) = &self.features {
            if f.dim < latent {
                return Err(ConfigError::Invalid(format!(
                    "feature dim {} smaller than latent space {latent}",
                    f.dim
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> CohortConfig {
        CohortConfig {
            datasets: vec![DatasetSpec {
                id: "d1".into(),
                size: 10,
            }],
            tasks: vec!["t".into()],
            aux_dims: 0,
            labelers: BTreeMap::new(),
            scorers: vec![],
            features: None,
            relabels: vec![],
        }
    }

    #[test]
    fn minimal_valid() {
        assert!(minimal().validate().is_ok());
    }

    #[test]
    fn bad_rates_rejected() {
        let mut c = minimal();
        let mut labeler = LabelerSpec::default();
        labeler.flip_rate.insert("t".into(), 1.5);
        c.labelers.insert("d1".into(), labeler);
        assert!(matches!(c.validate(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn scorer_referencing_unknown_dataset_rejected() {
        let mut c = minimal();
        c.scorers.push(ScorerSpec {
            model_id: "m".into(),
            train_domains: BTreeSet::from(["nope".to_string()]),
            seeds: vec![0],
            noise: 1.0,
            unseen_noise: None,
            shared_noise: 0.0,
            concepts: BTreeMap::new(),
            heads: None,
        });
        assert!(matches!(c.validate(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn feature_dim_must_cover_latents() {
        let mut c = minimal();
        c.aux_dims = 2;
        c.features = Some(FeatureSpec {
            dim: 2,
            separation: 1.0,
            noise: 0.1,
        });
        assert!(matches!(c.validate(), Err(ConfigError::Invalid(_))));
    }
}

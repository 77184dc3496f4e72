use super::{
    io, DataError, FeatureSet, LabelSet, PredictionSet, TaskVocabulary, UncertainPolicy,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

/// One label CSV and its source-level flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSource {
    pub dataset_id: String,
    pub path: PathBuf,
    #[serde(default)]
    pub exhaustive_negative: bool,
}

/// One prediction CSV and the model metadata attached to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSource {
    pub model_id: String,
    pub train_domains: BTreeSet<String>,
    pub seed: u64,
    pub eval_dataset_id: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSource {
    pub path: PathBuf,
}

/// The JSON document that ties a study's files together.
///
/// Paths are interpreted relative to the manifest's own directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyManifest {
    #[serde(default)]
    pub tasks: Option<Vec<String>>,
    #[serde(default)]
    pub uncertain_policy: UncertainPolicy,
    #[serde(default)]
    pub labels: Vec<LabelSource>,
    #[serde(default)]
    pub predictions: Vec<PredictionSource>,
    #[serde(default)]
    pub features: Vec<FeatureSource>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl StudyManifest {
    pub fn from_file(path: &Path) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path).map_err(|e| DataError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let manifest: StudyManifest =
            serde_json::from_str(&text).map_err(|e| DataError::Json {
                path: path.display().to_string(),
                source: e,
            })?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn to_file(&self, path: &Path) -> Result<(), DataError> {
        self.validate()?;
        let mut text = serde_json::to_string_pretty(self).map_err(|e| DataError::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        text.push('\n');
        io::write_atomic(path, text.as_bytes())
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let mut dataset_ids = BTreeSet::new();
        for l in &self.labels {
            if !dataset_ids.insert(&l.dataset_id) {
                return Err(DataError::Manifest(format!(
                    "duplicate label dataset id {:?}",
                    l.dataset_id
                )));
            }
        }
        let mut pred_keys = BTreeSet::new();
        for p in &self.predictions {
            let key = (&p.model_id, p.seed, &p.eval_dataset_id);
            if !pred_keys.insert(key) {
                return Err(DataError::Manifest(format!(
                    "duplicate prediction entry for model {:?} seed {} on {:?}",
                    p.model_id, p.seed, p.eval_dataset_id
                )));
            }
        }
        Ok(())
    }

    pub fn vocabulary(&self) -> Result<TaskVocabulary, DataError> {
        match &self.tasks {
            Some(tasks) => TaskVocabulary::new(tasks.clone()),
            None => Ok(TaskVocabulary::default_vocabulary()),
        }
    }

    /// Loads every referenced file into memory, conforming label and
    /// prediction columns to the study vocabulary.
    pub fn load(&self, manifest_dir: &Path) -> Result<Study, DataError> {
        self.validate()?;
        let vocab = self.vocabulary()?;
        let resolve = |p: &PathBuf| -> PathBuf {
            if p.is_absolute() {
                p.clone()
            } else {
                manifest_dir.join(p)
            }
        };

        let mut labels = BTreeMap::new();
        for src in &self.labels {
            let set = io::read_label_csv(&resolve(&src.path), &src.dataset_id, self.uncertain_policy)?
                .conform_to(&vocab)?;
            labels.insert(src.dataset_id.clone(), set);
        }

        let mut predictions = Vec::new();
        for src in &self.predictions {
            let set = io::read_prediction_csv(
                &resolve(&src.path),
                &src.model_id,
                src.train_domains.clone(),
                src.seed,
                &src.eval_dataset_id,
            )?
            .conform_to(&vocab)?;
            predictions.push(set);
        }
        // Deterministic study order regardless of manifest listing order.
        predictions.sort_by(|a, b| {
            (a.model_id(), a.eval_dataset_id(), a.seed()).cmp(&(
                b.model_id(),
                b.eval_dataset_id(),
                b.seed(),
            ))
        });

        let mut features = None;
        if let Some(src) = self.features.first() {
            features = Some(io::read_feature_csv(&resolve(&src.path))?);
        }

        Ok(Study {
            vocab,
            uncertain_policy: self.uncertain_policy,
            labels,
            predictions,
            features,
        })
    }
}

/// A fully loaded study: everything the protocol layer consumes.
#[derive(Debug, Clone)]
pub struct Study {
    pub vocab: TaskVocabulary,
    pub uncertain_policy: UncertainPolicy,
    pub labels: BTreeMap<String, LabelSet>,
    pub predictions: Vec<PredictionSet>,
    pub features: Option<FeatureSet>,
}

impl Study {
    /// Prediction sets evaluated on the given dataset, study order.
    pub fn predictions_on(&self, dataset_id: &str) -> Vec<&PredictionSet> {
        self.predictions
            .iter()
            .filter(|p| p.eval_dataset_id() == dataset_id)
            .collect()
    }

    /// Distinct model ids, sorted.
    pub fn model_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .predictions
            .iter()
            .map(|p| p.model_id().to_string())
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Ensemble members: all seeds of `model_id` on `dataset_id`, seed order.
    pub fn members(&self, model_id: &str, dataset_id: &str) -> Vec<&PredictionSet> {
        let mut members: Vec<&PredictionSet> = self
            .predictions
            .iter()
            .filter(|p| p.model_id() == model_id && p.eval_dataset_id() == dataset_id)
            .collect();
        members.sort_by_key(|p| p.seed());
        members
    }

    /// Train-domain composition per model id, for report metadata.
    pub fn train_domains_by_model(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for p in &self.predictions {
            out.entry(p.model_id().to_string())
                .or_default()
                .extend(p.train_domains().iter().cloned());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_dataset_id_rejected() {
        let m = StudyManifest {
            tasks: None,
            uncertain_policy: UncertainPolicy::Missing,
            labels: vec![
                LabelSource {
                    dataset_id: "d1".into(),
                    path: "a.csv".into(),
                    exhaustive_negative: false,
                },
                LabelSource {
                    dataset_id: "d1".into(),
                    path: "b.csv".into(),
                    exhaustive_negative: false,
                },
            ],
            predictions: vec![],
            features: vec![],
            output_dir: None,
        };
        assert!(matches!(m.validate(), Err(DataError::Manifest(_))));
    }

    #[test]
    fn manifest_roundtrip_and_load() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("labels.csv"), "sample_id,A\ns1,1\ns2,0\n").unwrap();
        std::fs::write(dir.path().join("preds.csv"), "sample_id,A\ns1,0.9\ns2,0.2\n").unwrap();
        let m = StudyManifest {
            tasks: Some(vec!["A".into()]),
            uncertain_policy: UncertainPolicy::Missing,
            labels: vec![LabelSource {
                dataset_id: "d1".into(),
                path: "labels.csv".into(),
                exhaustive_negative: false,
            }],
            predictions: vec![PredictionSource {
                model_id: "m1".into(),
                train_domains: BTreeSet::from(["d1".to_string()]),
                seed: 0,
                eval_dataset_id: "d1".into(),
                path: "preds.csv".into(),
            }],
            features: vec![],
            output_dir: None,
        };
        let mpath = dir.path().join("study.json");
        m.to_file(&mpath).unwrap();
        let back = StudyManifest::from_file(&mpath).unwrap();
        assert_eq!(m, back);
        let study = back.load(dir.path()).unwrap();
        assert_eq!(study.labels.len(), 1);
        assert_eq!(study.predictions.len(), 1);
        assert_eq!(study.model_ids(), vec!["m1".to_string()]);
    }
}

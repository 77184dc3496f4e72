use super::config::{CohortConfig, ConceptSpec, LabelerSpec};
use super::{rng::stream, ConfigError};
use crate::data::{
    FeatureSet, Label, LabelSet, LabelSource, PredictionSet, PredictionSource, Study,
    StudyManifest, TaskVocabulary, UncertainPolicy,
};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// A generated study, format-identical to an ingested one.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub tasks: Vec<String>,
    pub labels: BTreeMap<String, LabelSet>,
    pub predictions: Vec<PredictionSet>,
    pub features: Option<FeatureSet>,
}

impl Cohort {
    pub fn to_study(&self) -> Result<Study, ConfigError> {
        Ok(Study {
            vocab: TaskVocabulary::new(self.tasks.clone())?,
            uncertain_policy: UncertainPolicy::Missing,
            labels: self.labels.clone(),
            predictions: self.predictions.clone(),
            features: self.features.clone(),
        })
    }

    /// Writes every CSV plus a `study.json` manifest into `dir`; returns the
    /// manifest path.
    pub fn write_to_dir(&self, dir: &Path) -> Result<PathBuf, ConfigError> {
        let mut manifest = StudyManifest {
            tasks: Some(self.tasks.clone()),
            uncertain_policy: UncertainPolicy::Missing,
            labels: Vec::new(),
            predictions: Vec::new(),
            features: Vec::new(),
            output_dir: None,
        };
        for (dataset, set) in &self.labels {
            let name = format!("labels_{dataset}.csv");
            crate::data::write_label_csv(set, &dir.join(&name))?;
            manifest.labels.push(LabelSource {
                dataset_id: dataset.clone(),
                path: name.into(),
                exhaustive_negative: false,
            });
        }
        for set in &self.predictions {
            let name = format!(
                "preds_{}_s{}_{}.csv",
                set.model_id(),
                set.seed(),
                set.eval_dataset_id()
            );
            crate::data::write_prediction_csv(set, &dir.join(&name))?;
            manifest.predictions.push(PredictionSource {
                model_id: set.model_id().to_string(),
                train_domains: set.train_domains().clone(),
                seed: set.seed(),
                eval_dataset_id: set.eval_dataset_id().to_string(),
                path: name.into(),
            });
        }
        if let Some(features) = &self.features {
            crate::data::write_feature_csv(features, &dir.join("features.csv"))?;
            manifest.features.push(crate::data::FeatureSource {
                path: "features.csv".into(),
            });
        }
        let path = dir.join("study.json");
        manifest.to_file(&path)?;
        Ok(path)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Latent severity vectors of one dataset, sample-major.
struct DatasetLatents {
    ids: Vec<String>,
    latents: Vec<f64>, // n x latent_dims
}

/// Deterministic cohort generation.
///
/// Labels derive from each dataset's labeler applied to the latent state;
/// scores from each scorer's concept plus seeded noise; features embed the
/// latents so the probe can learn. Independent substreams per (purpose,
/// entity) mean adding a scorer or relabeling never changes existing data.
pub fn generate_cohort(config: &CohortConfig, master_seed: u64) -> Result<Cohort, ConfigError> {
    config.validate()?;
    let latent_dims = config.latent_dims();
    let n_tasks = config.tasks.len();
    let default_labeler = LabelerSpec::default();

    // Latents per dataset.
    let mut latents: BTreeMap<String, DatasetLatents> = BTreeMap::new();
    for d in &config.datasets {
        let mut rng = stream(master_seed, &["latent", &d.id]);
        let ids: Vec<String> = (0..d.size).map(|i| format!("{}-{i:06}", d.id)).collect();
        let mut values = Vec::with_capacity(d.size * latent_dims);
        for _ in 0..d.size * latent_dims {
            values.push(rng.sample::<f64, _>(StandardNormal));
        }
        latents.insert(
            d.id.clone(),
            DatasetLatents {
                ids,
                latents: values,
            },
        );
    }

    // Concept responses, resolved once per labeler/scorer use.
    let concept_for = |concepts: &BTreeMap<String, ConceptSpec>,
                       task_idx: usize|
     -> Result<(ConceptSpec, Vec<(usize, f64)>), ConfigError> {
        let spec = concepts
            .get(&config.tasks[task_idx])
            .cloned()
            .unwrap_or_else(|| ConceptSpec::axis(task_idx));
        let normalized = spec.normalized()?;
        Ok((spec, normalized))
    };

    let label_dataset = |source: &str,
                         out_id: &str,
                         labeler: &LabelerSpec|
     -> Result<LabelSet, ConfigError> {
        let data = &latents[source];
        let n = data.ids.len();
        let mut rng = stream(master_seed, &["labels", out_id]);
        let mut concepts = Vec::with_capacity(n_tasks);
        for t in 0..n_tasks {
            concepts.push(concept_for(&labeler.concepts, t)?);
        }
        let mut values = Vec::with_capacity(n * n_tasks);
        for i in 0..n {
            let latent = &data.latents[i * latent_dims..(i + 1) * latent_dims];
            for (t, task) in config.tasks.iter().enumerate() {
                let (spec, normalized) = &concepts[t];
                let g = spec.response(latent, normalized);
                let offset = labeler.threshold_offset.get(task).copied().unwrap_or(0.0);
                let mut y = g > offset;
                // Both draws happen unconditionally so rates only change
                // outcomes, not the stream layout.
                let flip_u: f64 = rng.gen();
                let missing_u: f64 = rng.gen();
                if flip_u < labeler.flip_rate.get(task).copied().unwrap_or(0.0) {
                    y = !y;
                }
                let missing = missing_u < labeler.missing_rate.get(task).copied().unwrap_or(0.0);
                values.push(if missing {
                    Label::Missing
                } else if y {
                    Label::Pos
                } else {
                    Label::Neg
                });
            }
        }
        Ok(LabelSet::new(
            out_id,
            data.ids.clone(),
            config.tasks.clone(),
            values,
        )?)
    };

    let mut labels = BTreeMap::new();
    for d in &config.datasets {
        let labeler = config.labelers.get(&d.id).unwrap_or(&default_labeler);
        labels.insert(d.id.clone(), label_dataset(&d.id, &d.id, labeler)?);
    }
    for r in &config.relabels {
        labels.insert(
            r.new_dataset_id.clone(),
            label_dataset(&r.source_dataset, &r.new_dataset_id, &r.labeler)?,
        );
    }

    // Shared score-noise per dataset, identical for every scorer.
    let mut shared_noise: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for d in &config.datasets {
        let mut rng = stream(master_seed, &["score-shared", &d.id]);
        let n = latents[&d.id].ids.len();
        let mut values = Vec::with_capacity(n * n_tasks);
        for _ in 0..n * n_tasks {
            values.push(rng.sample::<f64, _>(StandardNormal));
        }
        shared_noise.insert(d.id.clone(), values);
    }

    let mut predictions = Vec::new();
    for scorer in &config.scorers {
        let mut concepts = Vec::with_capacity(n_tasks);
        for t in 0..n_tasks {
            concepts.push(concept_for(&scorer.concepts, t)?);
        }
        for &seed in &scorer.seeds {
            for d in &config.datasets {
                let data = &latents[&d.id];
                let n = data.ids.len();
                let seed_str = seed.to_string();
                let mut own_rng = stream(
                    master_seed,
                    &["score-own", &scorer.model_id, &seed_str, &d.id],
                );
                let shared = &shared_noise[&d.id];
                let in_domain = scorer.train_domains.contains(&d.id);
                let sigma = if in_domain {
                    scorer.noise
                } else {
                    scorer.unseen_noise.unwrap_or(scorer.noise)
                };
                let w_shared = scorer.shared_noise.sqrt();
                let w_own = (1.0 - scorer.shared_noise).sqrt();
                let mut scores: Vec<Option<f64>> = Vec::with_capacity(n * n_tasks);
                for i in 0..n {
                    let latent = &data.latents[i * latent_dims..(i + 1) * latent_dims];
                    for (t, task) in config.tasks.iter().enumerate() {
                        let own: f64 = own_rng.sample(StandardNormal);
                        if let Some(heads) = &scorer.heads {
                            if !heads.contains(task) {
                                scores.push(None);
                                continue;
                            }
                        }
                        let (spec, normalized) = &concepts[t];
                        let g = spec.response(latent, normalized);
                        let eps = sigma * (w_shared * shared[i * n_tasks + t] + w_own * own);
                        scores.push(Some(sigmoid(g + eps)));
                    }
                }
                predictions.push(PredictionSet::new(
                    scorer.model_id.clone(),
                    scorer.train_domains.clone(),
                    seed,
                    d.id.clone(),
                    data.ids.clone(),
                    config.tasks.clone(),
                    scores,
                )?);
            }
        }
    }
    predictions.sort_by(|a, b| {
        (a.model_id(), a.eval_dataset_id(), a.seed()).cmp(&(
            b.model_id(),
            b.eval_dataset_id(),
            b.seed(),
        ))
    });

    // Features: latent embedding plus isotropic noise.
    let features = match &config.features {
        None => None,
        Some(spec) => {
            let mut ids = Vec::new();
            let mut dataset_ids = Vec::new();
            let mut data = Vec::new();
            for d in &config.datasets {
                let mut rng = stream(master_seed, &["features", &d.id]);
                let set = &latents[&d.id];
                for i in 0..set.ids.len() {
                    ids.push(set.ids[i].clone());
                    dataset_ids.push(d.id.clone());
                    let latent = &set.latents[i * latent_dims..(i + 1) * latent_dims];
                    for j in 0..spec.dim {
                        let noise: f64 = rng.sample(StandardNormal);
                        let signal = if j < latent_dims {
                            spec.separation * latent[j]
                        } else {
                            0.0
                        };
                        data.push(signal + spec.noise * noise);
                    }
                }
            }
            Some(FeatureSet::new(ids, dataset_ids, spec.dim, data)?)
        }
    };

    Ok(Cohort {
        tasks: config.tasks.clone(),
        labels,
        predictions,
        features,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::config::{DatasetSpec, FeatureSpec, ScorerSpec};
    use std::collections::BTreeSet;

    fn base_config() -> CohortConfig {
        CohortConfig {
            datasets: vec![
                DatasetSpec {
                    id: "d1".into(),
                    size: 200,
                },
                DatasetSpec {
                    id: "d2".into(),
                    size: 200,
                },
            ],
            tasks: vec!["a".into(), "b".into()],
            aux_dims: 0,
            labelers: BTreeMap::new(),
            scorers: vec![ScorerSpec {
                model_id: "m1".into(),
                train_domains: BTreeSet::from(["d1".to_string()]),
                seeds: vec![0, 1],
                noise: 0.0,
                unseen_noise: None,
                shared_noise: 0.0,
                concepts: BTreeMap::new(),
                heads: None,
            }],
            features: Some(FeatureSpec {
                dim: 4,
                separation: 1.0,
                noise: 0.2,
            }),
            relabels: vec![],
        }
    }

    #[test]
    fn same_seed_identical_output() {
        let config = base_config();
        let a = generate_cohort(&config, 7).unwrap();
        let b = generate_cohort(&config, 7).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.predictions, b.predictions);
        assert_eq!(a.features, b.features);
        let c = generate_cohort(&config, 8).unwrap();
        assert_ne!(a.labels, c.labels);
    }

    #[test]
    fn adding_a_scorer_never_perturbs_existing_data() {
        let config = base_config();
        let before = generate_cohort(&config, 7).unwrap();
        let mut extended = config.clone();
        extended.scorers.push(ScorerSpec {
            model_id: "m2".into(),
            train_domains: BTreeSet::from(["d2".to_string()]),
            seeds: vec![0],
            noise: 0.5,
            unseen_noise: None,
            shared_noise: 0.5,
            concepts: BTreeMap::new(),
            heads: None,
        });
        let after = generate_cohort(&extended, 7).unwrap();
        assert_eq!(before.labels, after.labels);
        assert_eq!(before.features, after.features);
        for p in &before.predictions {
            let matching = after
                .predictions
                .iter()
                .find(|q| {
                    q.model_id() == p.model_id()
                        && q.seed() == p.seed()
                        && q.eval_dataset_id() == p.eval_dataset_id()
                })
                .unwrap();
            assert_eq!(p, matching);
        }
    }

    #[test]
    fn zero_noise_zero_flip_scorer_is_perfect_on_own_dataset() {
        let cohort = generate_cohort(&base_config(), 3).unwrap();
        let study = cohort.to_study().unwrap();
        let labels = &study.labels["d1"];
        let members = study.members("m1", "d1");
        let v = crate::protocols::auc_cell(&members, labels, "a").unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn zero_flip_labelers_agree_exactly() {
        let mut config = base_config();
        config.relabels.push(crate::synth::RelabelSpec {
            source_dataset: "d1".into(),
            new_dataset_id: "d1_alt".into(),
            labeler: LabelerSpec::default(),
        });
        let cohort = generate_cohort(&config, 11).unwrap();
        let a = &cohort.labels["d1"];
        let b = &cohort.labels["d1_alt"];
        for r in 0..a.n_samples() {
            for t in 0..2 {
                assert_eq!(a.get(r, t), b.get(r, t));
            }
        }
    }

    #[test]
    fn roundtrip_through_directory() {
        let config = base_config();
        let cohort = generate_cohort(&config, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest_path = cohort.write_to_dir(dir.path()).unwrap();
        let manifest = StudyManifest::from_file(&manifest_path).unwrap();
        let study = manifest.load(dir.path()).unwrap();
        assert_eq!(study.labels.len(), cohort.labels.len());
        assert_eq!(study.predictions.len(), cohort.predictions.len());
        // Label grids survive the roundtrip exactly.
        assert_eq!(study.labels["d1"], cohort.labels["d1"]);
    }
}

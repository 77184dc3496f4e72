use super::analytic::{flipped_auc, monotone_score_auc};
use super::config::{
    CohortConfig, ConceptSpec, DatasetSpec, FeatureSpec, LabelerSpec, RelabelSpec, ScorerSpec,
};
use super::ConfigError;
use std::collections::BTreeMap;

/// Preset cohorts reproducing the qualitative phenomena under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Two conditionally independent discriminative scorers: both reach high
    /// AUC yet disagree on individual decisions (low pairwise kappa).
    GoodPerfPoorAgreement,
    /// Two near-duplicate scorers judged against heavily flipped labels:
    /// high pairwise kappa despite poor AUC.
    PoorPerfHighAgreement,
    /// Leave-one-domain-out cohort where the models excluding the test
    /// domain are degraded on it by a known, analytically planted AUC gap.
    PlantedLooGap,
    /// Three datasets sharing concepts on most tasks while one task's
    /// labeler concept diverges per dataset; the probe's same-task heads
    /// cannot merge for the divergent task.
    AlignedVsDivergentConcepts,
}

/// Documented quantitative targets of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioExpectations {
    /// Analytic AUC of each scorer against its test labels.
    pub scorer_auc: f64,
    /// Planted gap mean AUC(all-including) - mean AUC(all-except), when the
    /// scenario plants one.
    pub planted_auc_gap: Option<f64>,
    /// Name of the planted divergent-concept task, when present.
    pub divergent_task: Option<String>,
}

/// Noise levels used by the presets.
const GOOD_NOISE: f64 = 1.0;
const LOO_NOISE_SEEN: f64 = 0.6;
const LOO_NOISE_UNSEEN: f64 = 1.3;
const HEAVY_FLIP: f64 = 0.35;

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::GoodPerfPoorAgreement,
        Scenario::PoorPerfHighAgreement,
        Scenario::PlantedLooGap,
        Scenario::AlignedVsDivergentConcepts,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::GoodPerfPoorAgreement => "good-perf-poor-agreement",
            Scenario::PoorPerfHighAgreement => "poor-perf-high-agreement",
            Scenario::PlantedLooGap => "planted-loo-gap",
            Scenario::AlignedVsDivergentConcepts => "aligned-vs-divergent-concepts",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| ConfigError::UnknownScenario(name.to_string()))
    }

    pub fn config(&self) -> CohortConfig {
        match self {
            Scenario::GoodPerfPoorAgreement => agreement_cohort(0.0, 0.0),
            Scenario::PoorPerfHighAgreement => agreement_cohort(HEAVY_FLIP, 0.9),
            Scenario::PlantedLooGap => loo_cohort(),
            Scenario::AlignedVsDivergentConcepts => concept_cohort(),
        }
    }

    pub fn expectations(&self) -> ScenarioExpectations {
        match self {
            Scenario::GoodPerfPoorAgreement => ScenarioExpectations {
                scorer_auc: monotone_score_auc(GOOD_NOISE, 0.0),
                planted_auc_gap: None,
                divergent_task: None,
            },
            Scenario::PoorPerfHighAgreement => ScenarioExpectations {
                scorer_auc: flipped_auc(monotone_score_auc(GOOD_NOISE, 0.0), HEAVY_FLIP),
                planted_auc_gap: None,
                divergent_task: None,
            },
            Scenario::PlantedLooGap => ScenarioExpectations {
                scorer_auc: monotone_score_auc(LOO_NOISE_SEEN, 0.0),
                planted_auc_gap: Some(
                    monotone_score_auc(LOO_NOISE_SEEN, 0.0)
                        - monotone_score_auc(LOO_NOISE_UNSEEN, 0.0),
                ),
                divergent_task: None,
            },
            Scenario::AlignedVsDivergentConcepts => ScenarioExpectations {
                scorer_auc: monotone_score_auc(0.8, 0.0),
                planted_auc_gap: None,
                divergent_task: Some("divergent".to_string()),
            },
        }
    }
}

/// Builds the named preset.
pub fn scenario(name: &str) -> Result<CohortConfig, ConfigError> {
    Ok(Scenario::from_name(name)?.config())
}

fn plain_scorer(model_id: &str, domains: &[&str], seeds: &[u64], noise: f64) -> ScorerSpec {
    ScorerSpec {
        model_id: model_id.to_string(),
        train_domains: domains.iter().map(|s| s.to_string()).collect(),
        seeds: seeds.to_vec(),
        noise,
        unseen_noise: None,
        shared_noise: 0.0,
        concepts: BTreeMap::new(),
        heads: None,
    }
}

/// One dataset, two scorers; `flip` controls label corruption and `shared`
/// the scorers' noise coupling.
fn agreement_cohort(flip: f64, shared: f64) -> CohortConfig {
    let tasks = vec!["finding_a".to_string(), "finding_b".to_string()];
    let mut labeler = LabelerSpec::default();
    for t in &tasks {
        labeler.flip_rate.insert(t.clone(), flip);
    }
    let scorer = |id: &str| {
        let mut s = plain_scorer(id, &["main"], &[0], GOOD_NOISE);
        s.shared_noise = shared;
        s
    };
    CohortConfig {
        datasets: vec![DatasetSpec {
            id: "main".into(),
            size: 5000,
        }],
        tasks,
        aux_dims: 0,
        labelers: BTreeMap::from([("main".to_string(), labeler)]),
        scorers: vec![scorer("alpha"), scorer("beta")],
        features: Some(FeatureSpec {
            dim: 8,
            separation: 1.0,
            noise: 0.5,
        }),
        relabels: vec![RelabelSpec {
            source_dataset: "main".into(),
            new_dataset_id: "main_relabel".into(),
            labeler: {
                let mut l = LabelerSpec::default();
                l.threshold_offset.insert("finding_a".into(), 0.5);
                l.flip_rate.insert("finding_a".into(), 0.05);
                l.flip_rate.insert("finding_b".into(), 0.05);
                l
            },
        }],
    }
}

/// Three domains; per test domain a self-only model, an all-except model
/// degraded on the held-out domain, and one all-domain model.
fn loo_cohort() -> CohortConfig {
    let datasets: Vec<DatasetSpec> = (1..=3)
        .map(|i| DatasetSpec {
            id: format!("d{i}"),
            size: 4000,
        })
        .collect();
    let ids: Vec<String> = datasets.iter().map(|d| d.id.clone()).collect();
    let seeds = [0u64, 1, 2];
    let mut scorers = Vec::new();
    for d in &ids {
        scorers.push(plain_scorer(
            &format!("self-{d}"),
            &[d.as_str()],
            &seeds,
            LOO_NOISE_SEEN,
        ));
        let others: Vec<&str> = ids.iter().filter(|o| *o != d).map(|s| s.as_str()).collect();
        let mut except = plain_scorer(&format!("except-{d}"), &others, &seeds, LOO_NOISE_SEEN);
        except.unseen_noise = Some(LOO_NOISE_UNSEEN);
        scorers.push(except);
    }
    let all: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
    scorers.push(plain_scorer("all", &all, &seeds, LOO_NOISE_SEEN));
    CohortConfig {
        datasets,
        tasks: vec![
            "finding_a".to_string(),
            "finding_b".to_string(),
            "finding_c".to_string(),
        ],
        aux_dims: 0,
        labelers: BTreeMap::new(),
        scorers,
        features: None,
        relabels: vec![],
    }
}

/// Three datasets, four tasks; three tasks share one concept everywhere
/// while the fourth responds to a different latent direction per dataset.
fn concept_cohort() -> CohortConfig {
    let datasets: Vec<DatasetSpec> = (1..=3)
        .map(|i| DatasetSpec {
            id: format!("d{i}"),
            size: 200,
        })
        .collect();
    let tasks = vec![
        "shared_a".to_string(),
        "shared_b".to_string(),
        "shared_c".to_string(),
        "divergent".to_string(),
    ];
    // Latent axes 0..3 are the tasks; axis 4 is auxiliary. The divergent
    // task reads axis 3 in d1, axis 4 in d2, and their mixture in d3.
    let divergent_concepts = [
        ConceptSpec::axis(3),
        ConceptSpec::axis(4),
        ConceptSpec {
            axes: vec![(3, 1.0), (4, 1.0)],
        },
    ];
    let mut labelers = BTreeMap::new();
    for (i, d) in datasets.iter().enumerate() {
        let mut l = LabelerSpec::default();
        l.concepts
            .insert("divergent".to_string(), divergent_concepts[i].clone());
        labelers.insert(d.id.clone(), l);
    }
    let ids: Vec<&str> = ["d1", "d2", "d3"].to_vec();
    let scorers = ids
        .iter()
        .map(|d| plain_scorer(&format!("self-{d}"), &[d], &[0, 1], 0.8))
        .collect();
    CohortConfig {
        datasets,
        tasks,
        aux_dims: 1,
        labelers,
        scorers,
        features: Some(FeatureSpec {
            dim: 16,
            separation: 1.0,
            noise: 0.3,
        }),
        relabels: vec![],
    }
}

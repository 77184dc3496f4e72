use super::ProtocolError;
use crate::data::{Label, LabelSet, PredictionSet, Study};
use crate::metrics::auc;
use crate::util::mean_stdev;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Training-composition condition of a prediction set relative to the
/// dataset under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LooCondition {
    /// Trained only on the domain under test.
    SelfOnly,
    /// Trained on two or more domains, excluding the domain under test.
    AllExcept,
    /// Trained on two or more domains, including the domain under test.
    AllIncluding,
}

impl LooCondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            LooCondition::SelfOnly => "self-only",
            LooCondition::AllExcept => "all-except",
            LooCondition::AllIncluding => "all-including",
        }
    }

    /// Classifies by training-domain metadata, never by model name.
    pub fn classify(set: &PredictionSet, test_dataset: &str) -> Option<Self> {
        let domains = set.train_domains();
        let includes = domains.contains(test_dataset);
        match (domains.len(), includes) {
            (1, true) => Some(LooCondition::SelfOnly),
            (n, false) if n >= 2 => Some(LooCondition::AllExcept),
            (n, true) if n >= 2 => Some(LooCondition::AllIncluding),
            _ => None,
        }
    }
}

/// Seed statistics of one condition on one test dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooConditionStats {
    /// Mean over seeds of the per-seed task-mean AUC.
    pub mean_auc: f64,
    /// Stdev over seeds; `None` (flagged absent) with fewer than two seeds.
    pub stdev: Option<f64>,
    pub n_seeds: usize,
    /// Per-seed task-mean AUC.
    pub per_seed: BTreeMap<u64, f64>,
    /// Seed-mean AUC per task.
    pub per_task: BTreeMap<String, f64>,
}

/// One dataset under test with its three conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooTestSet {
    pub dataset: String,
    /// Tasks entering every condition's mean (dropped from all conditions if
    /// any condition could not compute them).
    pub tasks_used: Vec<String>,
    pub self_only: Option<LooConditionStats>,
    pub all_except: Option<LooConditionStats>,
    pub all_including: Option<LooConditionStats>,
}

impl LooTestSet {
    pub fn condition(&self, c: LooCondition) -> Option<&LooConditionStats> {
        match c {
            LooCondition::SelfOnly => self.self_only.as_ref(),
            LooCondition::AllExcept => self.all_except.as_ref(),
            LooCondition::AllIncluding => self.all_including.as_ref(),
        }
    }
}

/// Leave-one-domain-out summary across the study's test datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooReport {
    pub test_sets: Vec<LooTestSet>,
    /// (model_id, seed, eval dataset, reason) for unclassifiable sets.
    pub ignored: Vec<(String, u64, String, String)>,
    pub metadata: BTreeMap<String, String>,
}

impl LooReport {
    /// CSV rendering: one row per (dataset, condition).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str("dataset,condition,mean_auc,stdev,n_seeds\n");
        for ts in &self.test_sets {
            for c in [
                LooCondition::SelfOnly,
                LooCondition::AllExcept,
                LooCondition::AllIncluding,
            ] {
                out.push_str(&format!("{},{}", ts.dataset, c.as_str()));
                match ts.condition(c) {
                    Some(s) => {
                        out.push_str(&format!(",{}", crate::util::fmt_sig(s.mean_auc, 6)));
                        match s.stdev {
                            Some(sd) => out.push_str(&format!(",{}", crate::util::fmt_sig(sd, 6))),
                            None => out.push(','),
                        }
                        out.push_str(&format!(",{}", s.n_seeds));
                    }
                    None => out.push_str(",,,0"),
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Per-task AUC of a single prediction set on a label set; `None` where the
/// cell cannot be computed.
fn per_task_auc(set: &PredictionSet, labels: &LabelSet, task: &str) -> Option<f64> {
    let t_pred = set.task_index(task)?;
    let t_label = labels.task_index(task)?;
    let mut scores = Vec::new();
    let mut truth = Vec::new();
    for (row, id) in set.sample_ids().iter().enumerate() {
        let Some(l_row) = labels.row_of(id) else {
            continue;
        };
        let y = match labels.get(l_row, t_label) {
            Label::Pos => true,
            Label::Neg => false,
            Label::Missing => continue,
        };
        let Some(s) = set.get(row, t_pred) else {
            continue;
        };
        scores.push(s);
        truth.push(y);
    }
    auc(&scores, &truth).ok()
}

/// Groups the study's prediction sets by test dataset and training-domain
/// condition, averages AUC over shared tasks, and summarizes over seeds.
pub fn loo_summary(study: &Study) -> Result<LooReport, ProtocolError> {
    let mut ignored = Vec::new();
    // (dataset, condition) -> sets
    let mut grouped: BTreeMap<(String, LooCondition), Vec<&PredictionSet>> = BTreeMap::new();
    for set in &study.predictions {
        let dataset = set.eval_dataset_id().to_string();
        if !study.labels.contains_key(&dataset) {
            ignored.push((
                set.model_id().to_string(),
                set.seed(),
                dataset,
                "no label set for eval dataset".to_string(),
            ));
            continue;
        }
        match LooCondition::classify(set, &dataset) {
            Some(c) => grouped.entry((dataset, c)).or_default().push(set),
            None => ignored.push((
                set.model_id().to_string(),
                set.seed(),
                dataset,
                "unclassifiable train-domain composition (foreign single domain)".to_string(),
            )),
        }
    }

    let mut test_sets = Vec::new();
    let datasets: Vec<String> = {
        let mut d: Vec<String> = grouped.keys().map(|(ds, _)| ds.clone()).collect();
        d.sort();
        d.dedup();
        d
    };

    for dataset in datasets {
        let labels = &study.labels[&dataset];
        let conditions: Vec<(LooCondition, &Vec<&PredictionSet>)> = [
            LooCondition::SelfOnly,
            LooCondition::AllExcept,
            LooCondition::AllIncluding,
        ]
        .iter()
        .filter_map(|&c| grouped.get(&(dataset.clone(), c)).map(|v| (c, v)))
        .collect();

        // A task is used only when every set of every present condition can
        // compute it, so condition means stay comparable.
        let mut per_set_auc: BTreeMap<(String, u64, LooCondition), BTreeMap<String, f64>> =
            BTreeMap::new();
        let mut tasks_used: Vec<String> = Vec::new();
        for task in study.vocab.tasks() {
            let mut all_ok = true;
            let mut values: Vec<((String, u64, LooCondition), f64)> = Vec::new();
            for (c, sets) in &conditions {
                for set in sets.iter() {
                    match per_task_auc(set, labels, task) {
                        Some(v) => values.push((
                            (set.model_id().to_string(), set.seed(), *c),
                            v,
                        )),
                        None => {
                            all_ok = false;
                            break;
                        }
                    }
                }
                if !all_ok {
                    break;
                }
            }
            if all_ok && !values.is_empty() {
                tasks_used.push(task.clone());
                for (key, v) in values {
                    per_set_auc.entry(key).or_default().insert(task.clone(), v);
                }
            }
        }

        let stats_for = |condition: LooCondition| -> Option<LooConditionStats> {
            let entries: Vec<(&(String, u64, LooCondition), &BTreeMap<String, f64>)> = per_set_auc
                .iter()
                .filter(|((_, _, c), _)| *c == condition)
                .map(|(k, v)| (k, v))
                .collect();
            if entries.is_empty() || tasks_used.is_empty() {
                return None;
            }
            // Per-seed task means; multiple models in one condition and seed
            // average together.
            let mut by_seed: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
            let mut by_task: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for ((_, seed, _), tasks) in entries {
                let mean_over_tasks =
                    tasks.values().sum::<f64>() / tasks.len() as f64;
                by_seed.entry(*seed).or_default().push(mean_over_tasks);
                for (task, v) in tasks {
                    by_task.entry(task.clone()).or_default().push(*v);
                }
            }
            let per_seed: BTreeMap<u64, f64> = by_seed
                .into_iter()
                .map(|(s, vs)| (s, vs.iter().sum::<f64>() / vs.len() as f64))
                .collect();
            let seed_values: Vec<f64> = per_seed.values().cloned().collect();
            let (mean_auc, stdev) = mean_stdev(&seed_values);
            let per_task: BTreeMap<String, f64> = by_task
                .into_iter()
                .map(|(t, vs)| (t, vs.iter().sum::<f64>() / vs.len() as f64))
                .collect();
            Some(LooConditionStats {
                mean_auc,
                stdev,
                n_seeds: seed_values.len(),
                per_seed,
                per_task,
            })
        };

        let self_only = stats_for(LooCondition::SelfOnly);
        let all_except = stats_for(LooCondition::AllExcept);
        let all_including = stats_for(LooCondition::AllIncluding);
        test_sets.push(LooTestSet {
            dataset: dataset.clone(),
            tasks_used,
            self_only,
            all_except,
            all_including,
        });
    }

    if test_sets.is_empty() {
        return Err(ProtocolError::NoValidCells(
            "no classifiable prediction sets with labeled eval datasets".into(),
        ));
    }

    let mut metadata = BTreeMap::new();
    metadata.insert(
        "uncertain_policy".to_string(),
        study.uncertain_policy.as_str().to_string(),
    );
    Ok(LooReport {
        test_sets,
        ignored,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn set(model: &str, domains: &[&str], seed: u64, eval: &str) -> PredictionSet {
        PredictionSet::new(
            model,
            domains.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>(),
            seed,
            eval,
            vec!["x".into()],
            vec!["T".into()],
            vec![Some(0.5)],
        )
        .unwrap()
    }

    #[test]
    fn classification_matches_domain_composition() {
        assert_eq!(
            LooCondition::classify(&set("m", &["d1"], 0, "d1"), "d1"),
            Some(LooCondition::SelfOnly)
        );
        assert_eq!(
            LooCondition::classify(&set("m", &["d2", "d3"], 0, "d1"), "d1"),
            Some(LooCondition::AllExcept)
        );
        assert_eq!(
            LooCondition::classify(&set("m", &["d1", "d2"], 0, "d1"), "d1"),
            Some(LooCondition::AllIncluding)
        );
        // Foreign single domain is unclassifiable.
        assert_eq!(LooCondition::classify(&set("m", &["d2"], 0, "d1"), "d1"), None);
        // Empty domain set is unclassifiable.
        assert_eq!(LooCondition::classify(&set("m", &[], 0, "d1"), "d1"), None);
    }

    #[test]
    fn partition_is_exhaustive_and_exclusive() {
        // Over all non-empty subsets of {d1,d2,d3}, each classifiable set
        // lands in exactly one condition.
        let domains = ["d1", "d2", "d3"];
        for mask in 1u8..8 {
            let subset: Vec<&str> = domains
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, d)| *d)
                .collect();
            let s = set("m", &subset, 0, "d1");
            let matches: Vec<LooCondition> = [
                LooCondition::SelfOnly,
                LooCondition::AllExcept,
                LooCondition::AllIncluding,
            ]
            .into_iter()
            .filter(|&c| LooCondition::classify(&s, "d1") == Some(c))
            .collect();
            let foreign_single = subset.len() == 1 && subset[0] != "d1";
            assert_eq!(matches.len(), usize::from(!foreign_single));
        }
    }
}

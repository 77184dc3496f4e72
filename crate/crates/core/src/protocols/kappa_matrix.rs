use super::ensemble::{calibrated_model_scores, CellSkip, MembersMode};
use super::{MatrixReport, ProtocolError};
use crate::data::Study;
use crate::metrics::cohen_kappa;
use crate::util::intersect_sorted;
use rayon::prelude::*;

/// Pairwise inter-model kappa on one test dataset.
///
/// Rows are unordered model pairs `a|b` (lexicographic), columns tasks. In
/// ensemble mode the raters are the two models' calibrated ensemble outputs
/// thresholded at 0.5; in per-member mode every cross-model member pair is
/// compared the same way and the kappas averaged. Decisions compare on the
/// samples both models score (each model keeps its own calibration).
pub fn kappa_matrix(
    study: &Study,
    dataset_id: &str,
    mode: MembersMode,
) -> Result<MatrixReport, ProtocolError> {
    let labels = study.labels.get(dataset_id).ok_or_else(|| {
        ProtocolError::Argument(format!("no label set for dataset {dataset_id:?}"))
    })?;
    let models: Vec<String> = study
        .model_ids()
        .into_iter()
        .filter(|m| !study.members(m, dataset_id).is_empty())
        .collect();
    if models.len() < 2 {
        return Err(ProtocolError::InsufficientSamples(format!(
            "need at least 2 models with predictions on {dataset_id:?}, got {}",
            models.len()
        )));
    }

    let mut pairs = Vec::new();
    for a in 0..models.len() {
        for b in (a + 1)..models.len() {
            pairs.push(format!("{}|{}", models[a], models[b]));
        }
    }
    let tasks = study.vocab.tasks().to_vec();
    let mut report = MatrixReport::new("kappa", "model_pair", pairs.clone(), tasks.clone());
    report
        .metadata
        .insert("dataset".into(), dataset_id.to_string());
    report
        .metadata
        .insert("members_mode".into(), mode.as_str().into());
    report.metadata.insert(
        "uncertain_policy".into(),
        study.uncertain_policy.as_str().into(),
    );
    report
        .metadata
        .insert("decision_rule".into(), "calibrated >= 0.5".into());

    let jobs: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|r| (0..tasks.len()).map(move |c| (r, c)))
        .collect();
    let results: Vec<Result<f64, CellSkip>> = jobs
        .par_iter()
        .map(|&(r, c)| {
            let (ma, mb) = pairs[r].split_once('|').expect("pair key");
            kappa_cell(study, dataset_id, ma, mb, &tasks[c], mode)
        })
        .collect();

    for ((r, c), result) in jobs.into_iter().zip(results) {
        match result {
            Ok(v) => report.set_cell(r, c, v),
            Err(skip) => report.set_empty(r, c, skip.to_string()),
        }
    }
    let _ = labels;
    Ok(report)
}

fn kappa_cell(
    study: &Study,
    dataset_id: &str,
    model_a: &str,
    model_b: &str,
    task: &str,
    mode: MembersMode,
) -> Result<f64, CellSkip> {
    let labels = &study.labels[dataset_id];
    let members_a = study.members(model_a, dataset_id);
    let members_b = study.members(model_b, dataset_id);
    let cal_a = calibrated_model_scores(&members_a, labels, task)?;
    let cal_b = calibrated_model_scores(&members_b, labels, task)?;

    let common = intersect_sorted(&cal_a.sample_ids, &cal_b.sample_ids);
    if common.is_empty() {
        return Err(CellSkip::MissingClass);
    }
    let idx_a: Vec<usize> = common
        .iter()
        .map(|id| cal_a.sample_ids.binary_search_by(|s| s.as_str().cmp(id)).unwrap())
        .collect();
    let idx_b: Vec<usize> = common
        .iter()
        .map(|id| cal_b.sample_ids.binary_search_by(|s| s.as_str().cmp(id)).unwrap())
        .collect();

    match mode {
        MembersMode::Ensemble => {
            let da: Vec<bool> = idx_a.iter().map(|&i| cal_a.ensemble[i] >= 0.5).collect();
            let db: Vec<bool> = idx_b.iter().map(|&i| cal_b.ensemble[i] >= 0.5).collect();
            Ok(cohen_kappa(&da, &db).expect("equal non-empty lengths").kappa)
        }
        MembersMode::PerMember => {
            let mut sum = 0.0;
            let mut count = 0usize;
            for ma in &cal_a.per_member {
                let da: Vec<bool> = idx_a.iter().map(|&i| ma[i] >= 0.5).collect();
                for mb in &cal_b.per_member {
                    let db: Vec<bool> = idx_b.iter().map(|&i| mb[i] >= 0.5).collect();
                    sum += cohen_kappa(&da, &db).expect("equal non-empty lengths").kappa;
                    count += 1;
                }
            }
            Ok(sum / count as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Label, LabelSet, PredictionSet, Study, TaskVocabulary, UncertainPolicy};
    use std::collections::{BTreeMap, BTreeSet};

    fn study_with_two_models() -> Study {
        let ids: Vec<String> = (0..6).map(|i| format!("s{i}")).collect();
        let values = vec![
            Label::Pos,
            Label::Neg,
            Label::Pos,
            Label::Neg,
            Label::Pos,
            Label::Neg,
        ];
        let labels = LabelSet::new("d1", ids.clone(), vec!["T".into()], values).unwrap();
        let scores = vec![
            Some(0.9),
            Some(0.1),
            Some(0.8),
            Some(0.2),
            Some(0.7),
            Some(0.3),
        ];
        let mk = |model: &str, seed: u64| {
            PredictionSet::new(
                model,
                BTreeSet::from(["d1".to_string()]),
                seed,
                "d1",
                ids.clone(),
                vec!["T".into()],
                scores.clone(),
            )
            .unwrap()
        };
        Study {
            vocab: TaskVocabulary::new(["T"]).unwrap(),
            uncertain_policy: UncertainPolicy::Missing,
            labels: BTreeMap::from([("d1".to_string(), labels)]),
            predictions: vec![mk("a", 0), mk("b", 0)],
            features: None,
        }
    }

    #[test]
    fn identical_models_reach_kappa_one() {
        let study = study_with_two_models();
        let report = kappa_matrix(&study, "d1", MembersMode::Ensemble).unwrap();
        assert_eq!(report.row_ids, vec!["a|b"]);
        assert_eq!(report.get_by_ids("a|b", "T"), Some(1.0));
        // Per-member mode agrees for single-member models.
        let report2 = kappa_matrix(&study, "d1", MembersMode::PerMember).unwrap();
        assert_eq!(report2.get_by_ids("a|b", "T"), Some(1.0));
    }

    #[test]
    fn single_model_is_insufficient() {
        let mut study = study_with_two_models();
        study.predictions.truncate(1);
        assert!(matches!(
            kappa_matrix(&study, "d1", MembersMode::Ensemble),
            Err(ProtocolError::InsufficientSamples(_))
        ));
    }
}

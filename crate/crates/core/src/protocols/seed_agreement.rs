use super::ensemble::{calibrated_model_scores, CellSkip};
use super::{MatrixReport, ProtocolError};
use crate::data::Study;
use crate::metrics::cohen_kappa;
use rayon::prelude::*;

/// Agreement between a model's own seeds.
///
/// One row per (model, eval dataset) pair, one column per task; the cell is
/// the mean pairwise kappa across seed pairs, each member thresholded at 0.5
/// after its own calibration. Rows with fewer than two seeds stay EMPTY.
pub fn seed_agreement(study: &Study) -> Result<MatrixReport, ProtocolError> {
    let mut rows: Vec<(String, String)> = study
        .predictions
        .iter()
        .map(|p| (p.model_id().to_string(), p.eval_dataset_id().to_string()))
        .collect();
    rows.sort();
    rows.dedup();
    rows.retain(|(_, ds)| study.labels.contains_key(ds));
    if rows.is_empty() {
        return Err(ProtocolError::NoValidCells(
            "no (model, dataset) pair with labels".into(),
        ));
    }

    let row_ids: Vec<String> = rows.iter().map(|(m, d)| format!("{m}|{d}")).collect();
    let tasks = study.vocab.tasks().to_vec();
    let mut report = MatrixReport::new("seed-kappa", "model_dataset", row_ids, tasks.clone());
    report.metadata.insert(
        "uncertain_policy".into(),
        study.uncertain_policy.as_str().into(),
    );
    report
        .metadata
        .insert("decision_rule".into(), "calibrated >= 0.5".into());

    let jobs: Vec<(usize, usize)> = (0..rows.len())
        .flat_map(|r| (0..tasks.len()).map(move |c| (r, c)))
        .collect();
    let results: Vec<Result<f64, String>> = jobs
        .par_iter()
        .map(|&(r, c)| {
            let (model, dataset) = &rows[r];
            seed_cell(study, model, dataset, &tasks[c])
        })
        .collect();
    for ((r, c), result) in jobs.into_iter().zip(results) {
        match result {
            Ok(v) => report.set_cell(r, c, v),
            Err(reason) => report.set_empty(r, c, reason),
        }
    }
    Ok(report)
}

fn seed_cell(study: &Study, model: &str, dataset: &str, task: &str) -> Result<f64, String> {
    let members = study.members(model, dataset);
    if members.len() < 2 {
        return Err("single-seed".to_string());
    }
    let labels = &study.labels[dataset];
    let cal = calibrated_model_scores(&members, labels, task).map_err(|s: CellSkip| s.to_string())?;
    let decisions: Vec<Vec<bool>> = cal
        .per_member
        .iter()
        .map(|scores| scores.iter().map(|&s| s >= 0.5).collect())
        .collect();
    let mut sum = 0.0;
    let mut count = 0usize;
    for a in 0..decisions.len() {
        for b in (a + 1)..decisions.len() {
            sum += cohen_kappa(&decisions[a], &decisions[b])
                .expect("equal non-empty lengths")
                .kappa;
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Label, LabelSet, PredictionSet, TaskVocabulary, UncertainPolicy};
    use std::collections::{BTreeMap, BTreeSet};

    #[test]
    fn duplicated_seed_file_agrees_perfectly_and_single_seed_is_empty() {
        let ids: Vec<String> = (0..4).map(|i| format!("s{i}")).collect();
        let labels = LabelSet::new(
            "d1",
            ids.clone(),
            vec!["T".into()],
            vec![Label::Pos, Label::Neg, Label::Pos, Label::Neg],
        )
        .unwrap();
        let mk = |model: &str, seed: u64| {
            PredictionSet::new(
                model,
                BTreeSet::from(["d1".to_string()]),
                seed,
                "d1",
                ids.clone(),
                vec!["T".into()],
                vec![Some(0.9), Some(0.2), Some(0.7), Some(0.4)],
            )
            .unwrap()
        };
        let study = Study {
            vocab: TaskVocabulary::new(["T"]).unwrap(),
            uncertain_policy: UncertainPolicy::Missing,
            labels: BTreeMap::from([("d1".to_string(), labels)]),
            predictions: vec![mk("m", 0), mk("m", 1), mk("solo", 0)],
            features: None,
        };
        let report = seed_agreement(&study).unwrap();
        assert_eq!(report.get_by_ids("m|d1", "T"), Some(1.0));
        assert_eq!(report.get_by_ids("solo|d1", "T"), None);
        assert_eq!(report.empty_reasons["solo|d1|T"], "single-seed");
    }
}

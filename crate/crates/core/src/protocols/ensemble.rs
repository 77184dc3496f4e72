use super::{MatrixReport, ProtocolError};
use crate::data::{Label, LabelSet, PredictionSet, Study};
use crate::metrics::{auc, calibrate, optimal_operating_point, OperatingPoint};
use crate::util::intersect_sorted;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How multi-seed models enter pairwise agreement: as one averaged ensemble
/// rater or as individual members whose kappas are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembersMode {
    #[default]
    Ensemble,
    PerMember,
}

impl MembersMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MembersMode::Ensemble => "ensemble",
            MembersMode::PerMember => "per-member",
        }
    }
}

impl std::str::FromStr for MembersMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ensemble" => Ok(MembersMode::Ensemble),
            "per-member" => Ok(MembersMode::PerMember),
            other => Err(format!(
                "unknown members mode {other:?} (expected ensemble|per-member)"
            )),
        }
    }
}

/// Why a matrix cell cannot be computed. The rendered report shows these as
/// EMPTY (white) cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum CellSkip {
    #[error("missing-head")]
    MissingHead,
    #[error("missing-task")]
    MissingTask,
    #[error("missing-class")]
    MissingClass,
}

/// One model's calibrated scores on one (task, test-set) combination.
///
/// Samples are those with a present label and a present score in every
/// ensemble member; operating points are fitted per member on exactly these
/// samples.
#[derive(Debug, Clone)]
pub struct CalibratedScores {
    pub sample_ids: Vec<String>,
    /// Mean of the members' calibrated scores, per sample.
    pub ensemble: Vec<f64>,
    /// Calibrated scores per member (member-major).
    pub per_member: Vec<Vec<f64>>,
    /// Label truth per sample.
    pub labels: Vec<bool>,
    /// Per-member operating points, member order = ascending seed.
    pub ops: Vec<OperatingPoint>,
}

/// Calibrates a model's ensemble members against a test set for one task.
pub fn calibrated_model_scores(
    members: &[&PredictionSet],
    labels: &LabelSet,
    task: &str,
) -> Result<CalibratedScores, CellSkip> {
    let label_col = labels.task_index(task).ok_or(CellSkip::MissingTask)?;
    if !labels.task_observed(task) {
        return Err(CellSkip::MissingTask);
    }
    if members.is_empty() || !members.iter().any(|m| m.has_head(task)) {
        return Err(CellSkip::MissingHead);
    }
    let member_cols: Vec<usize> = members
        .iter()
        .map(|m| m.task_index(task).ok_or(CellSkip::MissingHead))
        .collect::<Result<_, _>>()?;

    // Common ids across every member and the label set.
    let mut ids: Vec<String> = labels.sample_ids().to_vec();
    for m in members {
        ids = intersect_sorted(&ids, m.sample_ids())
            .into_iter()
            .map(String::from)
            .collect();
    }

    let mut sample_ids = Vec::new();
    let mut raw: Vec<Vec<f64>> = vec![Vec::new(); members.len()];
    let mut truth = Vec::new();
    'samples: for id in &ids {
        let l_row = labels.row_of(id).expect("intersection id");
        let y = match labels.get(l_row, label_col) {
            Label::Pos => true,
            Label::Neg => false,
            Label::Missing => continue,
        };
        let mut scores = Vec::with_capacity(members.len());
        for (m, &col) in members.iter().zip(&member_cols) {
            let row = m.row_of(id).expect("intersection id");
            match m.get(row, col) {
                Some(s) => scores.push(s),
                None => continue 'samples,
            }
        }
        sample_ids.push(id.clone());
        truth.push(y);
        for (store, s) in raw.iter_mut().zip(scores) {
            store.push(s);
        }
    }

    if truth.iter().all(|&y| y) || truth.iter().all(|&y| !y) {
        return Err(CellSkip::MissingClass);
    }

    let ops: Vec<OperatingPoint> = raw
        .iter()
        .map(|scores| optimal_operating_point(scores, &truth).expect("both classes present"))
        .collect();
    let per_member: Vec<Vec<f64>> = raw
        .iter()
        .zip(&ops)
        .map(|(scores, op)| scores.iter().map(|&s| calibrate(s, op)).collect())
        .collect();
    let n = sample_ids.len();
    let ensemble: Vec<f64> = (0..n)
        .map(|i| per_member.iter().map(|m| m[i]).sum::<f64>() / members.len() as f64)
        .collect();

    Ok(CalibratedScores {
        sample_ids,
        ensemble,
        per_member,
        labels: truth,
        ops,
    })
}

/// One AUC matrix cell: ensemble-calibrated AUC of a model on (task, test
/// set). Re-running an EMPTY cell through this function reproduces the
/// exact skip reason.
pub fn auc_cell(
    members: &[&PredictionSet],
    labels: &LabelSet,
    task: &str,
) -> Result<f64, CellSkip> {
    let scores = calibrated_model_scores(members, labels, task)?;
    Ok(auc(&scores.ensemble, &scores.labels).expect("both classes present"))
}

pub(crate) fn auc_matrix(study: &Study) -> Result<MatrixReport, ProtocolError> {
    let models = study.model_ids();
    if models.is_empty() || study.labels.is_empty() {
        return Err(ProtocolError::NoValidCells(
            "study has no predictions or no label sets".into(),
        ));
    }
    let mut col_ids = Vec::new();
    for task in study.vocab.tasks() {
        for dataset in study.labels.keys() {
            col_ids.push(format!("{task}|{dataset}"));
        }
    }
    let mut report = MatrixReport::new("auc", "model", models.clone(), col_ids.clone());
    report
        .metadata
        .insert("uncertain_policy".into(), study.uncertain_policy.as_str().into());
    report
        .metadata
        .insert("calibration".into(), "per-member operating point, ensemble mean".into());
    for (model, domains) in study.train_domains_by_model() {
        report
            .row_info
            .insert(model, domains.into_iter().collect());
    }

    // Cells are independent; compute in parallel, assemble in order.
    let jobs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|r| (0..col_ids.len()).map(move |c| (r, c)))
        .collect();
    let results: Vec<Result<f64, CellSkip>> = jobs
        .par_iter()
        .map(|&(r, c)| {
            let (task, dataset) = col_ids[c].split_once('|').expect("composite col id");
            let labels = &study.labels[dataset];
            let members = study.members(&models[r], dataset);
            if members.is_empty() {
                return Err(CellSkip::MissingHead);
            }
            auc_cell(&members, labels, task)
        })
        .collect();

    let mut any = false;
    for ((r, c), result) in jobs.into_iter().zip(results) {
        match result {
            Ok(v) => {
                report.set_cell(r, c, v);
                any = true;
            }
            Err(skip) => report.set_empty(r, c, skip.to_string()),
        }
    }
    if !any {
        return Err(ProtocolError::NoValidCells(
            "every (model, task, dataset) cell is empty".into(),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{LabelSet, PredictionSet};
    use std::collections::BTreeSet;

    fn labels(ids: &[&str], values: &[Label]) -> LabelSet {
        LabelSet::new(
            "d1",
            ids.iter().map(|s| s.to_string()).collect(),
            vec!["T".into()],
            values.to_vec(),
        )
        .unwrap()
    }

    fn preds(seed: u64, ids: &[&str], scores: &[Option<f64>]) -> PredictionSet {
        PredictionSet::new(
            "m",
            BTreeSet::from(["d1".to_string()]),
            seed,
            "d1",
            ids.iter().map(|s| s.to_string()).collect(),
            vec!["T".into()],
            scores.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn separable_model_reaches_auc_one() {
        let l = labels(&["a", "b", "c", "d"], &[Label::Pos, Label::Pos, Label::Neg, Label::Neg]);
        let p = preds(0, &["a", "b", "c", "d"], &[Some(0.9), Some(0.8), Some(0.2), Some(0.1)]);
        let v = auc_cell(&[&p], &l, "T").unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn missing_task_and_head_and_class_reported() {
        let l = labels(&["a", "b"], &[Label::Missing, Label::Missing]);
        let p = preds(0, &["a", "b"], &[Some(0.5), Some(0.5)]);
        assert_eq!(auc_cell(&[&p], &l, "T"), Err(CellSkip::MissingTask));
        assert_eq!(auc_cell(&[&p], &l, "U"), Err(CellSkip::MissingTask));

        let l2 = labels(&["a", "b"], &[Label::Pos, Label::Neg]);
        let p2 = preds(0, &["a", "b"], &[None, None]);
        assert_eq!(auc_cell(&[&p2], &l2, "T"), Err(CellSkip::MissingHead));

        let l3 = labels(&["a", "b"], &[Label::Pos, Label::Pos]);
        assert_eq!(auc_cell(&[&p], &l3, "T"), Err(CellSkip::MissingClass));
    }

    #[test]
    fn sporadic_missing_scores_drop_samples() {
        let l = labels(
            &["a", "b", "c", "d"],
            &[Label::Pos, Label::Neg, Label::Pos, Label::Neg],
        );
        let m1 = preds(0, &["a", "b", "c", "d"], &[Some(0.9), Some(0.1), None, Some(0.2)]);
        let m2 = preds(1, &["a", "b", "c", "d"], &[Some(0.8), Some(0.2), Some(0.7), Some(0.3)]);
        let s = calibrated_model_scores(&[&m1, &m2], &l, "T").unwrap();
        // c is dropped because member 1 lacks it.
        assert_eq!(s.sample_ids, vec!["a", "b", "d"]);
        assert_eq!(s.per_member.len(), 2);
    }

    #[test]
    fn ensemble_mean_of_calibrated_members() {
        let l = labels(&["a", "b"], &[Label::Pos, Label::Neg]);
        let m1 = preds(0, &["a", "b"], &[Some(0.9), Some(0.1)]);
        let m2 = preds(1, &["a", "b"], &[Some(0.6), Some(0.4)]);
        let s = calibrated_model_scores(&[&m1, &m2], &l, "T").unwrap();
        for i in 0..2 {
            let mean = (s.per_member[0][i] + s.per_member[1][i]) / 2.0;
            assert!((s.ensemble[i] - mean).abs() < 1e-15);
        }
        // Each member's own positive sample calibrates above 0.5.
        assert!(s.per_member[0][0] >= 0.5);
        assert!(s.per_member[1][0] >= 0.5);
    }
}

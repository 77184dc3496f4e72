use super::ensemble::calibrated_model_scores;
use super::ProtocolError;
use crate::data::{Label, LabelSet, PredictionSet};
use crate::util::intersect_sorted;
use serde::{Deserialize, Serialize};

/// Which model predicts higher for a mined case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    A,
    B,
    Tie,
}

/// Restricts mining to samples with a given label state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelFilter {
    #[default]
    Any,
    Positive,
    Negative,
    Missing,
}

impl LabelFilter {
    fn admits(&self, label: Label) -> bool {
        match self {
            LabelFilter::Any => true,
            LabelFilter::Positive => label == Label::Pos,
            LabelFilter::Negative => label == Label::Neg,
            LabelFilter::Missing => label == Label::Missing,
        }
    }
}

impl std::str::FromStr for LabelFilter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "any" => Ok(LabelFilter::Any),
            "positive" | "pos" => Ok(LabelFilter::Positive),
            "negative" | "neg" => Ok(LabelFilter::Negative),
            "missing" => Ok(LabelFilter::Missing),
            other => Err(format!(
                "unknown label filter {other:?} (expected any|positive|negative|missing)"
            )),
        }
    }
}

/// One sample where two models' calibrated outputs diverge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisagreementCase {
    pub sample_id: String,
    pub score_a: f64,
    pub score_b: f64,
    /// Label state of the sample in the provided label source.
    pub label: Label,
    /// |score_a - score_b|, the ranking key.
    pub gap: f64,
    pub higher: Direction,
}

/// Ranks the top-k samples by calibrated-score disagreement between two
/// models, largest gap first, ties broken by ascending sample id. Increasing
/// k extends the list without reordering the prefix.
pub fn mine_disagreements(
    members_a: &[&PredictionSet],
    members_b: &[&PredictionSet],
    labels: &LabelSet,
    task: &str,
    filter: LabelFilter,
    k: usize,
) -> Result<Vec<DisagreementCase>, ProtocolError> {
    if k == 0 {
        return Err(ProtocolError::Argument("k must be positive".into()));
    }
    let cal_a = calibrated_model_scores(members_a, labels, task)
        .map_err(|s| ProtocolError::InsufficientSamples(format!("model A: {s}")))?;
    let cal_b = calibrated_model_scores(members_b, labels, task)
        .map_err(|s| ProtocolError::InsufficientSamples(format!("model B: {s}")))?;
    let label_col = labels.task_index(task).expect("checked by calibration");

    let common = intersect_sorted(&cal_a.sample_ids, &cal_b.sample_ids);
    let mut cases = Vec::new();
    for id in common {
        let row = labels.row_of(id).expect("intersection id");
        let label = labels.get(row, label_col);
        if !filter.admits(label) {
            continue;
        }
        let ia = cal_a
            .sample_ids
            .binary_search_by(|s| s.as_str().cmp(id))
            .unwrap();
        let ib = cal_b
            .sample_ids
            .binary_search_by(|s| s.as_str().cmp(id))
            .unwrap();
        let (score_a, score_b) = (cal_a.ensemble[ia], cal_b.ensemble[ib]);
        let gap = (score_a - score_b).abs();
        let higher = if score_a > score_b {
            Direction::A
        } else if score_b > score_a {
            Direction::B
        } else {
            Direction::Tie
        };
        cases.push(DisagreementCase {
            sample_id: id.to_string(),
            score_a,
            score_b,
            label,
            gap,
            higher,
        });
    }

    cases.sort_by(|x, y| {
        y.gap
            .partial_cmp(&x.gap)
            .expect("finite gaps")
            .then_with(|| x.sample_id.cmp(&y.sample_id))
    });
    cases.truncate(k);
    Ok(cases)
}

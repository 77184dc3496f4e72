use super::ProtocolError;
use crate::data::{Label, LabelSet};
use crate::metrics::{confusion_f1, AgreementTable};
use crate::util::intersect_sorted;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Maps one task of the reference label set onto one task of the comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPairing {
    pub task_a: String,
    pub task_b: String,
}

/// Label agreement between two labelings of overlapping samples.
///
/// For each pairing, the confusion table runs over the common samples where
/// both sides are non-missing, treating side A as the reference for F1.
pub fn relabel_agreement(
    labels_a: &LabelSet,
    labels_b: &LabelSet,
    pairings: &[TaskPairing],
) -> Result<Vec<(TaskPairing, AgreementTable)>, ProtocolError> {
    let common = intersect_sorted(labels_a.sample_ids(), labels_b.sample_ids());
    if common.is_empty() {
        return Err(ProtocolError::InsufficientSamples(format!(
            "no common samples between {:?} and {:?}",
            labels_a.dataset_id(),
            labels_b.dataset_id()
        )));
    }
    let mut out = Vec::new();
    for pairing in pairings {
        let ta = labels_a.task_index(&pairing.task_a).ok_or_else(|| {
            ProtocolError::Argument(format!(
                "task {:?} not in {:?}",
                pairing.task_a,
                labels_a.dataset_id()
            ))
        })?;
        let tb = labels_b.task_index(&pairing.task_b).ok_or_else(|| {
            ProtocolError::Argument(format!(
                "task {:?} not in {:?}",
                pairing.task_b,
                labels_b.dataset_id()
            ))
        })?;
        let mut reference = Vec::new();
        let mut comparison = Vec::new();
        for id in &common {
            let ra = labels_a.row_of(id).expect("intersection id");
            let rb = labels_b.row_of(id).expect("intersection id");
            let (va, vb) = (labels_a.get(ra, ta), labels_b.get(rb, tb));
            if va == Label::Missing || vb == Label::Missing {
                continue;
            }
            reference.push(va == Label::Pos);
            comparison.push(vb == Label::Pos);
        }
        let table = confusion_f1(&reference, &comparison).expect("equal lengths");
        out.push((pairing.clone(), table));
    }
    Ok(out)
}

/// One reader's binary call on one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaterRow {
    pub sample_id: String,
    pub reader_id: String,
    pub positive: bool,
}

/// Fraction of multi-read samples without unanimous agreement.
///
/// Samples carrying fewer than two reads are excluded. Returns
/// (disagreeing samples, eligible samples, fraction).
pub fn rater_disagreement(rows: &[RaterRow]) -> Result<(usize, usize, f64), ProtocolError> {
    let mut by_sample: BTreeMap<&str, Vec<bool>> = BTreeMap::new();
    for row in rows {
        by_sample
            .entry(row.sample_id.as_str())
            .or_default()
            .push(row.positive);
    }
    let mut eligible = 0usize;
    let mut disagree = 0usize;
    for calls in by_sample.values() {
        if calls.len() < 2 {
            continue;
        }
        eligible += 1;
        if calls.iter().any(|&c| c != calls[0]) {
            disagree += 1;
        }
    }
    if eligible == 0 {
        return Err(ProtocolError::InsufficientSamples(
            "no sample has two or more reads".into(),
        ));
    }
    Ok((disagree, eligible, disagree as f64 / eligible as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label_set(dataset: &str, ids: &[&str], task: &str, values: &[Label]) -> LabelSet {
        LabelSet::new(
            dataset,
            ids.iter().map(|s| s.to_string()).collect(),
            vec![task.to_string()],
            values.to_vec(),
        )
        .unwrap()
    }

    fn pairing(a: &str, b: &str) -> TaskPairing {
        TaskPairing {
            task_a: a.into(),
            task_b: b.into(),
        }
    }

    #[test]
    fn identical_label_sets_reach_f1_one() {
        let a = label_set("A", &["s1", "s2", "s3"], "T", &[Label::Pos, Label::Neg, Label::Pos]);
        let b = label_set("B", &["s1", "s2", "s3"], "T", &[Label::Pos, Label::Neg, Label::Pos]);
        let out = relabel_agreement(&a, &b, &[pairing("T", "T")]).unwrap();
        assert_eq!(out[0].1.f1, Some(1.0));
    }

    #[test]
    fn planted_flips_match_hand_tally() {
        // 6 common samples; B flips two of A's positives and one negative.
        let values_a = [Label::Pos, Label::Pos, Label::Pos, Label::Neg, Label::Neg, Label::Neg];
        let values_b = [Label::Neg, Label::Neg, Label::Pos, Label::Pos, Label::Neg, Label::Neg];
        let ids = ["s1", "s2", "s3", "s4", "s5", "s6"];
        let a = label_set("A", &ids, "T", &values_a);
        let b = label_set("B", &ids, "T", &values_b);
        let out = relabel_agreement(&a, &b, &[pairing("T", "T")]).unwrap();
        let t = out[0].1;
        assert_eq!((t.true_pos, t.false_pos, t.false_neg, t.true_neg), (1, 1, 2, 2));
        assert_eq!(t.f1, Some(2.0 / (2.0 + 1.0 + 2.0)));
    }

    #[test]
    fn missing_cells_are_skipped() {
        let a = label_set("A", &["s1", "s2"], "T", &[Label::Pos, Label::Missing]);
        let b = label_set("B", &["s1", "s2"], "T", &[Label::Pos, Label::Pos]);
        let out = relabel_agreement(&a, &b, &[pairing("T", "T")]).unwrap();
        assert_eq!(out[0].1.n(), 1);
    }

    #[test]
    fn disjoint_samples_error() {
        let a = label_set("A", &["s1"], "T", &[Label::Pos]);
        let b = label_set("B", &["s2"], "T", &[Label::Pos]);
        assert!(matches!(
            relabel_agreement(&a, &b, &[pairing("T", "T")]),
            Err(ProtocolError::InsufficientSamples(_))
        ));
    }

    #[test]
    fn rater_disagreement_counts_non_unanimous() {
        let mut rows = Vec::new();
        // 10 samples, 3 readers each; one sample disagrees.
        for i in 0..10 {
            for r in 0..3 {
                rows.push(RaterRow {
                    sample_id: format!("s{i}"),
                    reader_id: format!("r{r}"),
                    positive: i == 0 && r == 2,
                });
            }
        }
        // Single-read sample is excluded.
        rows.push(RaterRow {
            sample_id: "solo".into(),
            reader_id: "r0".into(),
            positive: true,
        });
        let (disagree, eligible, fraction) = rater_disagreement(&rows).unwrap();
        assert_eq!((disagree, eligible), (1, 10));
        assert!((fraction - 0.1).abs() < 1e-12);
    }
}

use super::{LabelSet, PredictionSet};
use crate::util::intersect_sorted;

/// Paired view over the samples two collections have in common, ordered by
/// ascending `sample_id`. Row indices address the original collections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedPairs {
    pub sample_ids: Vec<String>,
    pub left_rows: Vec<usize>,
    pub right_rows: Vec<usize>,
}

impl AlignedPairs {
    pub fn len(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_ids.is_empty()
    }
}

/// Intersection of two ascending id lists; the shared ordering both sides see.
pub fn align_ids(a: &[String], b: &[String]) -> Vec<String> {
    intersect_sorted(a, b).into_iter().map(String::from).collect()
}

/// Pairs a prediction set with a label set over their common samples.
///
/// The intersection may be empty; downstream operations decide whether that
/// is an error.
pub fn align_samples(predictions: &PredictionSet, labels: &LabelSet) -> AlignedPairs {
    let ids = align_ids(predictions.sample_ids(), labels.sample_ids());
    let left_rows = ids
        .iter()
        .map(|id| predictions.row_of(id).expect("id from intersection"))
        .collect();
    let right_rows = ids
        .iter()
        .map(|id| labels.row_of(id).expect("id from intersection"))
        .collect();
    AlignedPairs {
        sample_ids: ids,
        left_rows,
        right_rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;
    use std::collections::BTreeSet;

    fn labels(ids: &[&str]) -> LabelSet {
        LabelSet::new(
            "d1",
            ids.iter().map(|s| s.to_string()).collect(),
            vec!["T".into()],
            vec![Label::Pos; ids.len()],
        )
        .unwrap()
    }

    fn preds(ids: &[&str]) -> PredictionSet {
        PredictionSet::new(
            "m",
            BTreeSet::new(),
            0,
            "d1",
            ids.iter().map(|s| s.to_string()).collect(),
            vec!["T".into()],
            vec![Some(0.5); ids.len()],
        )
        .unwrap()
    }

    #[test]
    fn intersection_semantics() {
        let view = align_samples(&preds(&["s1", "s2"]), &labels(&["s2", "s3"]));
        assert_eq!(view.sample_ids, ["s2"]);
    }

    #[test]
    fn identical_sets_align_in_sorted_order() {
        let view = align_samples(&preds(&["s2", "s1"]), &labels(&["s1", "s2"]));
        assert_eq!(view.sample_ids, ["s1", "s2"]);
        assert_eq!(view.left_rows, [0, 1]);
        assert_eq!(view.right_rows, [0, 1]);
    }

    #[test]
    fn disjoint_sets_yield_empty_view() {
        let view = align_samples(&preds(&["a"]), &labels(&["b"]));
        assert!(view.is_empty());
    }

    #[test]
    fn alignment_is_symmetric_in_id_sequence() {
        let a: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let b: Vec<String> = ["w", "y", "z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(align_ids(&a, &b), align_ids(&b, &a));
    }
}

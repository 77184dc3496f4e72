use super::{check_same_len, MetricError};
use serde::{Deserialize, Serialize};

/// Binary confusion counts with the comparison's F1 against a reference.
///
/// `f1` is `None` when tp = fp = fn = 0 (all true negatives), where the
/// statistic is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementTable {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
    pub f1: Option<f64>,
}

impl AgreementTable {
    pub fn n(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }
}

/// Confusion table of `comparison` against `reference`: positives of the
/// reference that the comparison also marks positive are true positives.
pub fn confusion_f1(reference: &[bool], comparison: &[bool]) -> Result<AgreementTable, MetricError> {
    check_same_len(reference.len(), comparison.len())?;
    let mut t = AgreementTable {
        true_pos: 0,
        false_pos: 0,
        false_neg: 0,
        true_neg: 0,
        f1: None,
    };
    for (&r, &c) in reference.iter().zip(comparison) {
        match (r, c) {
            (true, true) => t.true_pos += 1,
            (false, true) => t.false_pos += 1,
            (true, false) => t.false_neg += 1,
            (false, false) => t.true_neg += 1,
        }
    }
    let denom = 2 * t.true_pos + t.false_pos + t.false_neg;
    if denom > 0 {
        t.f1 = Some(2.0 * t.true_pos as f64 / denom as f64);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_all_positive_is_one() {
        let a = [true; 5];
        let t = confusion_f1(&a, &a).unwrap();
        assert_eq!(t.f1, Some(1.0));
        assert_eq!(t.true_pos, 5);
    }

    #[test]
    fn half_value() {
        // tp=5, fp=5, fn=5 -> f1 = 10/20 = 0.5.
        let mut reference = Vec::new();
        let mut comparison = Vec::new();
        for _ in 0..5 {
            reference.push(true);
            comparison.push(true);
        }
        for _ in 0..5 {
            reference.push(false);
            comparison.push(true);
        }
        for _ in 0..5 {
            reference.push(true);
            comparison.push(false);
        }
        let t = confusion_f1(&reference, &comparison).unwrap();
        assert_eq!(t.f1, Some(0.5));
    }

    #[test]
    fn disjoint_positives_zero() {
        let reference = [true, true, false, false];
        let comparison = [false, false, true, true];
        let t = confusion_f1(&reference, &comparison).unwrap();
        assert_eq!(t.f1, Some(0.0));
    }

    #[test]
    fn all_negative_undefined() {
        let a = [false; 4];
        let t = confusion_f1(&a, &a).unwrap();
        assert_eq!(t.f1, None);
        assert_eq!(t.true_neg, 4);
    }

    #[test]
    fn counts_partition_n() {
        let reference = [true, false, true, false, true];
        let comparison = [true, true, false, false, true];
        let t = confusion_f1(&reference, &comparison).unwrap();
        assert_eq!(t.n(), 5);
    }
}

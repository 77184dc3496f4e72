use super::{check_same_len, check_scores, MetricError};
use serde::{Deserialize, Serialize};

/// Clamping bound keeping operating points inside the open unit interval, so
/// the calibration transform stays finite. Negligible at data scale.
pub const OPT_CLAMP: f64 = 1e-6;

/// ROC curve over the decision rule "positive iff score >= threshold".
///
/// Thresholds descend from an infinite sentinel (no positives) down to the
/// smallest observed score (all positives), so the endpoints (0,0) and (1,1)
/// are always present and both rates are non-decreasing along the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub thresholds: Vec<f64>,
    pub tpr: Vec<f64>,
    pub fpr: Vec<f64>,
}

/// The informedness-optimal decision threshold for one (model, task,
/// test-set) combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Threshold in (0,1) after clamping.
    pub opt: f64,
    /// max TPR - FPR at the chosen threshold.
    pub informedness: f64,
    /// Whether clamping moved the raw threshold.
    pub clamped: bool,
}

impl OperatingPoint {
    /// An operating point at a known threshold. Fails outside (0,1).
    pub fn new(opt: f64) -> Result<Self, MetricError> {
        if !opt.is_finite() || opt <= 0.0 || opt >= 1.0 {
            return Err(MetricError::DegenerateOperatingPoint { opt });
        }
        Ok(Self {
            opt,
            informedness: 0.0,
            clamped: false,
        })
    }
}

fn count_classes(labels: &[bool]) -> Result<(usize, usize), MetricError> {
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(MetricError::MissingClass);
    }
    Ok((pos, neg))
}

/// Area under the ROC curve via the Mann-Whitney rank statistic with midrank
/// tie correction: the probability that a random positive outscores a random
/// negative, ties counted one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64, MetricError> {
    check_same_len(scores.len(), labels.len())?;
    check_scores(scores)?;
    let (pos, neg) = count_classes(labels)?;

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    // Midranks over tie groups; accumulate the rank sum of positives.
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1 ..= j
        for &idx in &order[i..j] {
            if labels[idx] {
                rank_sum_pos += midrank;
            }
        }
        i = j;
    }

    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// Full ROC curve across the candidate thresholds (distinct observed scores
/// plus the infinite sentinel), descending.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve, MetricError> {
    check_same_len(scores.len(), labels.len())?;
    check_scores(scores)?;
    let (pos, neg) = count_classes(labels)?;

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
    });

    let mut thresholds = vec![f64::INFINITY];
    let mut tpr = vec![0.0];
    let mut fpr = vec![0.0];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        let mut j = i;
        while j < order.len() && scores[order[j]] == threshold {
            if labels[order[j]] {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        thresholds.push(threshold);
        tpr.push(tp as f64 / pos as f64);
        fpr.push(fp as f64 / neg as f64);
        i = j;
    }
    Ok(RocCurve {
        thresholds,
        tpr,
        fpr,
    })
}

/// The threshold maximizing informedness J = TPR - FPR over the candidate
/// thresholds. Ties resolve to the smallest threshold; the result is clamped
/// into [OPT_CLAMP, 1 - OPT_CLAMP].
pub fn optimal_operating_point(
    scores: &[f64],
    labels: &[bool],
) -> Result<OperatingPoint, MetricError> {
    let curve = roc_curve(scores, labels)?;
    let mut best_j = f64::NEG_INFINITY;
    let mut best_threshold = f64::INFINITY;
    // Scan from the smallest threshold upward so ties keep the smallest.
    for i in (0..curve.thresholds.len()).rev() {
        let j = curve.tpr[i] - curve.fpr[i];
        if j > best_j {
            best_j = j;
            best_threshold = curve.thresholds[i];
        }
    }
    // The sentinel yields J = 0 and so does the smallest observed score when
    // nothing is informative; the smallest-threshold tie-break means an
    // observed score always wins.
    debug_assert!(best_threshold.is_finite());
    let clamped_value = best_threshold.clamp(OPT_CLAMP, 1.0 - OPT_CLAMP);
    Ok(OperatingPoint {
        opt: clamped_value,
        informedness: best_j,
        clamped: clamped_value != best_threshold,
    })
}

use super::{check_same_len, MetricError};
use crate::util::mean_stdev;
use serde::{Deserialize, Serialize};

/// Bland-Altman method-comparison summary: per-sample (mean, difference)
/// points with the bias and 1.96-sigma limits of agreement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlandAltmanSummary {
    /// (mean of the pair, a - b) per sample.
    pub points: Vec<(f64, f64)>,
    /// Mean difference.
    pub bias: f64,
    pub loa_low: f64,
    pub loa_high: f64,
    /// Sample standard deviation of the differences.
    pub stdev: f64,
}

/// Paired-difference analysis of two measurement lists.
pub fn bland_altman(a: &[f64], b: &[f64]) -> Result<BlandAltmanSummary, MetricError> {
    check_same_len(a.len(), b.len())?;
    if a.len() < 2 {
        return Err(MetricError::InsufficientSamples {
            required: 2,
            got: a.len(),
        });
    }
    let points: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| ((x + y) / 2.0, x - y))
        .collect();
    let diffs: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (bias, stdev) = mean_stdev(&diffs);
    let stdev = stdev.expect("n >= 2");
    Ok(BlandAltmanSummary {
        points,
        bias,
        loa_low: bias - 1.96 * stdev,
        loa_high: bias + 1.96 * stdev,
        stdev,
    })
}

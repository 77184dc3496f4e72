use super::ProbeError;
use crate::protocols::MatrixReport;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Relationship between per-task head distances and cross-domain AUC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    /// (task, distance, mean cross-domain AUC), task-sorted.
    pub points: Vec<(String, f64, f64)>,
    /// Spearman rank correlation; `None` when either side has zero rank
    /// variance.
    pub spearman_rho: Option<f64>,
}

/// Pairs each task's head distance with its mean cross-domain AUC and ranks
/// the relationship.
///
/// Cross-domain cells are those where the evaluating dataset is not among
/// the model's training domains; the mapping comes from `train_domains`.
pub fn similarity_vs_generalization(
    distances: &BTreeMap<String, f64>,
    auc_report: &MatrixReport,
    train_domains: &BTreeMap<String, BTreeSet<String>>,
) -> Result<CorrelationReport, ProbeError> {
    // Mean AUC per task over cross-domain cells.
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (r, model) in auc_report.row_ids.iter().enumerate() {
        let Some(domains) = train_domains.get(model) else {
            continue;
        };
        for (c, col) in auc_report.col_ids.iter().enumerate() {
            let Some(value) = auc_report.cell(r, c) else {
                continue;
            };
            let Some((task, dataset)) = col.split_once('|') else {
                continue;
            };
            if domains.contains(dataset) {
                continue; // in-domain cell
            }
            let e = sums.entry(task.to_string()).or_insert((0.0, 0));
            e.0 += value;
            e.1 += 1;
        }
    }

    let mut points = Vec::new();
    for (task, &distance) in distances {
        if let Some(&(sum, count)) = sums.get(task) {
            points.push((task.clone(), distance, sum / count as f64));
        }
    }
    if points.len() < 3 {
        return Err(ProbeError::InsufficientSamples {
            required: 3,
            got: points.len(),
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
    Ok(CorrelationReport {
        spearman_rho: spearman(&xs, &ys),
        points,
    })
}

/// Average ranks (1-based), ties receiving the mean of their rank range.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation with average-rank ties; `None` on zero rank
/// variance.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = rx.len() as f64;
    let mean_x = rx.iter().sum::<f64>() / n;
    let mean_y = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in rx.iter().zip(&ry) {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x) * (x - mean_x);
        var_y += (y - mean_y) * (y - mean_y);
    }
    if var_x == 0.0 || var_y == 0.0 {
        return None;
    }
    Some(cov / (var_x.sqrt() * var_y.sqrt()))
}

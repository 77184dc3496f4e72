use super::{ProbeError, ProbeModel};
use serde::{Deserialize, Serialize};

/// Per-task head-divergence summary for two training variants.
///
/// For each task, the mean pairwise L2 distance among its dataset heads
/// (weight vectors only) is averaged over seeds and normalized by the
/// maximum across tasks within the variant, so the most divergent task
/// reads 1.0. `None` marks tasks with no head pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSummary {
    pub tasks: Vec<String>,
    pub unregularized: Vec<Option<f64>>,
    pub regularized: Vec<Option<f64>>,
    /// Raw (pre-normalization) mean distances, for downstream analyses.
    pub unregularized_raw: Vec<Option<f64>>,
    pub regularized_raw: Vec<Option<f64>>,
}

/// Mean pairwise distance among the heads of each task for one model.
pub fn per_task_head_distances(model: &ProbeModel) -> Vec<Option<f64>> {
    let n_datasets = model.datasets().len();
    let mut out = Vec::with_capacity(model.tasks().len());
    for t_idx in 0..model.tasks().len() {
        if n_datasets < 2 {
            out.push(None);
            continue;
        }
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for a in 0..n_datasets {
            for b in (a + 1)..n_datasets {
                let wa = model.weight(a, t_idx);
                let wb = model.weight(b, t_idx);
                let d2: f64 = wa.iter().zip(wb).map(|(x, y)| (x - y) * (x - y)).sum();
                sum += d2.sqrt();
                pairs += 1;
            }
        }
        out.push(Some(sum / pairs as f64));
    }
    out
}

/// Seed-averaged, task-normalized head distances for the two variants.
pub fn weight_distance_summary(
    unregularized: &[ProbeModel],
    regularized: &[ProbeModel],
) -> Result<DistanceSummary, ProbeError> {
    if unregularized.is_empty() || regularized.is_empty() {
        return Err(ProbeError::Argument(
            "each variant needs at least one seed model".into(),
        ));
    }
    let tasks = unregularized[0].tasks().to_vec();
    for m in unregularized.iter().chain(regularized) {
        if m.tasks() != tasks.as_slice() {
            return Err(ProbeError::Shape(
                "models disagree on the task list".into(),
            ));
        }
    }

    let average = |models: &[ProbeModel]| -> Vec<Option<f64>> {
        let per_model: Vec<Vec<Option<f64>>> =
            models.iter().map(per_task_head_distances).collect();
        (0..tasks.len())
            .map(|t| {
                let vals: Vec<f64> = per_model.iter().filter_map(|m| m[t]).collect();
                if vals.is_empty() {
                    None
                } else {
                    Some(vals.iter().sum::<f64>() / vals.len() as f64)
                }
            })
            .collect()
    };

    let normalize = |raw: &[Option<f64>]| -> Vec<Option<f64>> {
        let max = raw.iter().flatten().cloned().fold(0.0f64, f64::max);
        raw.iter()
            .map(|v| {
                v.map(|d| if max > 0.0 { d / max } else { 0.0 })
            })
            .collect()
    };

    let unreg_raw = average(unregularized);
    let reg_raw = average(regularized);
    Ok(DistanceSummary {
        tasks,
        unregularized: normalize(&unreg_raw),
        regularized: normalize(&reg_raw),
        unregularized_raw: unreg_raw,
        regularized_raw: reg_raw,
    })
}

impl DistanceSummary {
    /// Serializes as CSV: `task,unregularized,regularized` with six
    /// significant digits and empty cells for undefined entries.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("task,unregularized,regularized\n");
        for (i, task) in self.tasks.iter().enumerate() {
            out.push_str(task);
            for v in [self.unregularized[i], self.regularized[i]] {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&crate::util::fmt_sig(v, 6));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_with_heads(heads: &[(&str, &str, Vec<f64>)]) -> ProbeModel {
        let mut datasets: Vec<String> = Vec::new();
        let mut tasks: Vec<String> = Vec::new();
        for (d, t, _) in heads {
            if !datasets.contains(&d.to_string()) {
                datasets.push(d.to_string());
            }
            if !tasks.contains(&t.to_string()) {
                tasks.push(t.to_string());
            }
        }
        let dim = heads[0].2.len();
        let mut model = ProbeModel::zeros(datasets, tasks, dim);
        for (d, t, w) in heads {
            let d_idx = model.dataset_index(d).unwrap();
            let t_idx = model.task_index(t).unwrap();
            let h = d_idx * model.tasks().len() + t_idx;
            model.weights_flat_mut()[h * dim..(h + 1) * dim].copy_from_slice(w);
        }
        model
    }

    #[test]
    fn identical_heads_are_zero_everywhere() {
        let m = model_with_heads(&[
            ("d1", "A", vec![1.0, 2.0]),
            ("d2", "A", vec![1.0, 2.0]),
        ]);
        let s = weight_distance_summary(&[m.clone()], &[m]).unwrap();
        assert_eq!(s.unregularized, vec![Some(0.0)]);
        assert_eq!(s.regularized, vec![Some(0.0)]);
    }

    #[test]
    fn planted_far_task_normalizes_to_one() {
        let m = model_with_heads(&[
            ("d1", "A", vec![0.0, 0.0]),
            ("d1", "B", vec![0.0, 0.0]),
            ("d2", "A", vec![0.1, 0.0]),
            ("d2", "B", vec![10.0, 0.0]),
        ]);
        let s = weight_distance_summary(&[m.clone()], &[m]).unwrap();
        let b_idx = s.tasks.iter().position(|t| t == "B").unwrap();
        let a_idx = s.tasks.iter().position(|t| t == "A").unwrap();
        assert_eq!(s.unregularized[b_idx], Some(1.0));
        assert!(s.unregularized[a_idx].unwrap() < 0.02);
    }

    #[test]
    fn matches_naive_pair_oracle() {
        // 3 datasets, 2 tasks, pseudo-random heads; compare against a direct
        // O(pairs) recomputation.
        let mut state = 77u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 33) as f64) / (1u64 << 31) as f64 - 1.0
        };
        let heads: Vec<(&str, &str, Vec<f64>)> = vec![
            ("d1", "A", (0..4).map(|_| next()).collect()),
            ("d1", "B", (0..4).map(|_| next()).collect()),
            ("d2", "A", (0..4).map(|_| next()).collect()),
            ("d2", "B", (0..4).map(|_| next()).collect()),
            ("d3", "A", (0..4).map(|_| next()).collect()),
            ("d3", "B", (0..4).map(|_| next()).collect()),
        ];
        let m = model_with_heads(&heads);
        let dists = per_task_head_distances(&m);
        for (t_idx, task) in ["A", "B"].iter().enumerate() {
            let ws: Vec<&Vec<f64>> = heads
                .iter()
                .filter(|(_, t, _)| t == task)
                .map(|(_, _, w)| w)
                .collect();
            let mut sum = 0.0;
            let mut count = 0;
            for a in 0..ws.len() {
                for b in (a + 1)..ws.len() {
                    sum += ws[a]
                        .iter()
                        .zip(ws[b])
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt();
                    count += 1;
                }
            }
            assert!((dists[t_idx].unwrap() - sum / count as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn single_dataset_yields_empty_entries() {
        let m = model_with_heads(&[("d1", "A", vec![1.0])]);
        let s = weight_distance_summary(&[m.clone()], &[m]).unwrap();
        assert_eq!(s.unregularized, vec![None]);
    }
}

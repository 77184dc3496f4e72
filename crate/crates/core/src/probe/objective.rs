use super::{ProbeError, ProbeModel, TaskWeights};
use crate::data::{FeatureSet, Label, LabelSet};
use std::collections::BTreeMap;

/// Loss decomposition of one objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub loss: f64,
    pub data_term: f64,
    pub reg_term: f64,
}

/// Gradient with the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGradient {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl ProbeGradient {
    fn zeros(model: &ProbeModel) -> Self {
        Self {
            weights: vec![0.0; model.n_heads() * model.feature_dim()],
            biases: vec![0.0; model.n_heads()],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Sample rows of a feature set resolved against the per-dataset labels,
/// built once per training run.
pub(crate) struct ResolvedCohort {
    /// Per feature row: dataset index in the model, if the model knows it.
    pub dataset_idx: Vec<Option<usize>>,
    /// Per feature row: row in that dataset's label set.
    pub label_row: Vec<Option<usize>>,
}

pub(crate) fn resolve_cohort(
    model: &ProbeModel,
    features: &FeatureSet,
    labels: &BTreeMap<String, LabelSet>,
) -> Result<ResolvedCohort, ProbeError> {
    if features.dim() != model.feature_dim() {
        return Err(ProbeError::Shape(format!(
            "feature dim {} does not match model dim {}",
            features.dim(),
            model.feature_dim()
        )));
    }
    let mut dataset_idx = Vec::with_capacity(features.n_samples());
    let mut label_row = Vec::with_capacity(features.n_samples());
    for i in 0..features.n_samples() {
        let ds = &features.dataset_ids()[i];
        let d = model.dataset_index(ds);
        dataset_idx.push(d);
        label_row.push(match (d, labels.get(ds)) {
            (Some(_), Some(set)) => set.row_of(&features.sample_ids()[i]),
            _ => None,
        });
    }
    Ok(ResolvedCohort {
        dataset_idx,
        label_row,
    })
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable binary cross-entropy of a logit against a 0/1 target:
/// max(z,0) - z*y + ln(1 + exp(-|z|)).
fn bce_from_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

/// Masked, task-weighted loss and exact gradient.
///
/// The data term averages w_t * BCE(sigmoid(w.f + b), y) over the labeled
/// cells whose head the model defines; samples only touch heads of their own
/// dataset. Averaging (rather than summing) keeps the regularizer strength
/// comparable across cohort sizes. The regularizer adds lambda * sum over
/// tasks and datasets of the squared distance between each head and its task
/// centroid (weights only, biases excluded).
pub fn probe_objective(
    model: &ProbeModel,
    features: &FeatureSet,
    labels: &BTreeMap<String, LabelSet>,
    weights: &TaskWeights,
    lambda: f64,
) -> Result<(Objective, ProbeGradient), ProbeError> {
    let cohort = resolve_cohort(model, features, labels)?;
    probe_objective_resolved(model, features, labels, &cohort, weights, lambda)
}

pub(crate) fn probe_objective_resolved(
    model: &ProbeModel,
    features: &FeatureSet,
    labels: &BTreeMap<String, LabelSet>,
    cohort: &ResolvedCohort,
    task_weights: &TaskWeights,
    lambda: f64,
) -> Result<(Objective, ProbeGradient), ProbeError> {
    if task_weights.weights.len() != model.tasks().len() {
        return Err(ProbeError::Shape(format!(
            "{} task weights for {} tasks",
            task_weights.weights.len(),
            model.tasks().len()
        )));
    }
    if !(lambda >= 0.0) {
        return Err(ProbeError::Argument(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }

    let dim = model.feature_dim();
    let n_tasks = model.tasks().len();
    let n_datasets = model.datasets().len();
    let mut grad = ProbeGradient::zeros(model);
    let mut data_term = 0.0f64;

    // Count labeled cells first so the average's scale factor is a single
    // constant applied in one pass.
    let mut labeled_cells = 0usize;
    for i in 0..features.n_samples() {
        let (Some(_), Some(l_row)) = (cohort.dataset_idx[i], cohort.label_row[i]) else {
            continue;
        };
        let set = &labels[&features.dataset_ids()[i]];
        for t_idx in 0..n_tasks {
            if label_value(set, l_row, model, t_idx).is_some() {
                labeled_cells += 1;
            }
        }
    }
    let scale = if labeled_cells > 0 {
        1.0 / labeled_cells as f64
    } else {
        0.0
    };

    // Data term: fixed sample-major, task-minor order so reductions are
    // bitwise reproducible.
    for i in 0..features.n_samples() {
        let (Some(d_idx), Some(l_row)) = (cohort.dataset_idx[i], cohort.label_row[i]) else {
            continue;
        };
        let set = &labels[&features.dataset_ids()[i]];
        let x = features.row(i);
        for t_idx in 0..n_tasks {
            let y = match label_value(set, l_row, model, t_idx) {
                Some(y) => y,
                None => continue,
            };
            let h = d_idx * n_tasks + t_idx;
            let w = &model.weights_flat()[h * dim..(h + 1) * dim];
            let z = dot(w, x) + model.biases_flat()[h];
            let wt = scale * task_weights.weights[t_idx];
            data_term += wt * bce_from_logit(z, y);
            let residual = wt * (sigmoid(z) - y);
            let gw = &mut grad.weights[h * dim..(h + 1) * dim];
            for (g, &xv) in gw.iter_mut().zip(x) {
                *g += residual * xv;
            }
            grad.biases[h] += residual;
        }
    }

    // Alignment term: squared distance of each head to its task centroid.
    // The centroid's own dependence on the heads cancels in the gradient,
    // which is exactly 2 lambda (w - centroid).
    let mut reg_term = 0.0f64;
    if lambda > 0.0 && n_datasets > 1 {
        let mut centroid = vec![0.0f64; dim];
        for t_idx in 0..n_tasks {
            centroid.iter_mut().for_each(|c| *c = 0.0);
            for d_idx in 0..n_datasets {
                let w = model.weight(d_idx, t_idx);
                for (c, &wv) in centroid.iter_mut().zip(w) {
                    *c += wv;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= n_datasets as f64);
            for d_idx in 0..n_datasets {
                let h = d_idx * n_tasks + t_idx;
                let w = &model.weights_flat()[h * dim..(h + 1) * dim];
                let gw = &mut grad.weights[h * dim..(h + 1) * dim];
                for ((g, &wv), &cv) in gw.iter_mut().zip(w).zip(centroid.iter()) {
                    let diff = wv - cv;
                    reg_term += lambda * diff * diff;
                    *g += 2.0 * lambda * diff;
                }
            }
        }
    }

    let objective = Objective {
        loss: data_term + reg_term,
        data_term,
        reg_term,
    };
    Ok((objective, grad))
}

fn label_value(set: &LabelSet, row: usize, model: &ProbeModel, t_idx: usize) -> Option<f64> {
    let task = &model.tasks()[t_idx];
    let col = set.task_index(task)?;
    match set.get(row, col) {
        Label::Pos => Some(1.0),
        Label::Neg => Some(0.0),
        Label::Missing => None,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSet, Label, LabelSet};

    fn features(ids: &[&str], datasets: &[&str], dim: usize, data: Vec<f64>) -> FeatureSet {
        FeatureSet::new(
            ids.iter().map(|s| s.to_string()).collect(),
            datasets.iter().map(|s| s.to_string()).collect(),
            dim,
            data,
        )
        .unwrap()
    }

    fn label_set(dataset: &str, ids: &[&str], tasks: &[&str], values: Vec<Label>) -> LabelSet {
        LabelSet::new(
            dataset,
            ids.iter().map(|s| s.to_string()).collect(),
            tasks.iter().map(|s| s.to_string()).collect(),
            values,
        )
        .unwrap()
    }

    #[test]
    fn zero_model_balanced_labels_is_ln2_per_cell() {
        let model = ProbeModel::zeros(vec!["d".into()], vec!["t".into()], 2);
        let f = features(&["a", "b"], &["d", "d"], 2, vec![1.0, 0.0, 0.0, 1.0]);
        let l = BTreeMap::from([(
            "d".to_string(),
            label_set("d", &["a", "b"], &["t"], vec![Label::Pos, Label::Neg]),
        )]);
        let (obj, _) =
            probe_objective(&model, &f, &l, &TaskWeights::uniform(1), 0.0).unwrap();
        // Every labeled cell contributes exactly ln 2 at sigma(0) = 0.5; the
        // cell-averaged data term is therefore ln 2.
        assert!((obj.loss - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(obj.reg_term, 0.0);
    }

    #[test]
    fn all_missing_labels_zero_loss_and_gradient() {
        let model = ProbeModel::zeros(vec!["d".into()], vec!["t".into()], 2);
        let f = features(&["a"], &["d"], 2, vec![1.0, 2.0]);
        let l = BTreeMap::from([(
            "d".to_string(),
            label_set("d", &["a"], &["t"], vec![Label::Missing]),
        )]);
        let (obj, grad) =
            probe_objective(&model, &f, &l, &TaskWeights::uniform(1), 0.0).unwrap();
        assert_eq!(obj.loss, 0.0);
        assert!(grad.weights.iter().all(|&g| g == 0.0));
        assert!(grad.biases.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn task_weight_scales_loss() {
        let model = ProbeModel::zeros(vec!["d".into()], vec!["t".into()], 1);
        let f = features(&["a"], &["d"], 1, vec![1.0]);
        let l = BTreeMap::from([(
            "d".to_string(),
            label_set("d", &["a"], &["t"], vec![Label::Pos]),
        )]);
        let uniform = TaskWeights::uniform(1);
        let mut halved = TaskWeights::uniform(1);
        halved.weights[0] = 0.5;
        let (a, ga) = probe_objective(&model, &f, &l, &uniform, 0.0).unwrap();
        let (b, gb) = probe_objective(&model, &f, &l, &halved, 0.0).unwrap();
        assert!((b.loss - 0.5 * a.loss).abs() < 1e-15);
        assert!((gb.biases[0] - 0.5 * ga.biases[0]).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let model = ProbeModel::zeros(vec!["d".into()], vec!["t".into()], 3);
        let f = features(&["a"], &["d"], 2, vec![1.0, 0.0]);
        let l = BTreeMap::new();
        assert!(matches!(
            probe_objective(&model, &f, &l, &TaskWeights::uniform(1), 0.0),
            Err(ProbeError::Shape(_))
        ));
    }

    #[test]
    fn regularizer_pulls_to_centroid_and_grad_is_exact_form() {
        // Two datasets, one task, weights (1,0) and (0,0): centroid (0.5,0),
        // reg = lambda * (0.25 + 0.25) * 2 dims... distances: ||(0.5,0)||^2
        // twice = 0.5 total.
        let mut model = ProbeModel::zeros(vec!["d1".into(), "d2".into()], vec!["t".into()], 2);
        model.weights_flat_mut()[0] = 1.0;
        let f = features(&["a"], &["d1"], 2, vec![0.0, 0.0]);
        let l = BTreeMap::from([(
            "d1".to_string(),
            label_set("d1", &["a"], &["t"], vec![Label::Missing]),
        )]);
        let lambda = 2.0;
        let (obj, grad) =
            probe_objective(&model, &f, &l, &TaskWeights::uniform(1), lambda).unwrap();
        assert!((obj.reg_term - lambda * 0.5).abs() < 1e-15);
        // d/dw1[0] = 2 lambda (1 - 0.5) = 2.0; d/dw2[0] = 2 lambda (0 - 0.5).
        assert!((grad.weights[0] - 2.0 * lambda * 0.5).abs() < 1e-15);
        assert!((grad.weights[2] + 2.0 * lambda * 0.5).abs() < 1e-15);
    }
}

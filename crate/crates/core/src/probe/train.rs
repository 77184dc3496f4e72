use super::objective::{probe_objective_resolved, resolve_cohort};
use super::{task_weights, ProbeConfig, ProbeError, ProbeGradient, ProbeModel, TaskWeights};
use crate::data::{dataset_counts, FeatureSet, LabelSet};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One logged point of the training loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iter: usize,
    pub loss: f64,
    pub data_term: f64,
    pub reg_term: f64,
}

/// Loss history of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub points: Vec<TracePoint>,
    pub final_loss: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl TrainingTrace {
    /// Serializes as CSV: `iter,loss,data_term,reg_term`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("iter,loss,data_term,reg_term\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.iter, p.loss, p.data_term, p.reg_term
            ));
        }
        out
    }
}

/// Trains the probe by deterministic full-batch gradient descent.
///
/// The step size backtracks (halves) whenever a step would increase the
/// loss, so the recorded loss is non-increasing; after an accepted step the
/// rate relaxes back up. Identical configuration and inputs give identical
/// results; different seeds differ through the initialization.
pub fn train_probe(
    config: &ProbeConfig,
    features: &FeatureSet,
    labels: &BTreeMap<String, LabelSet>,
) -> Result<(ProbeModel, TrainingTrace), ProbeError> {
    config.validate()?;
    let weights = if config.use_task_weights {
        pooled_task_weights(config, labels)?
    } else {
        TaskWeights::uniform(config.tasks.len())
    };

    let mut model = ProbeModel::init(config);
    let cohort = resolve_cohort(&model, features, labels)?;
    let mut labeled_cells = 0usize;
    for i in 0..features.n_samples() {
        let (Some(_), Some(l_row)) = (cohort.dataset_idx[i], cohort.label_row[i]) else {
            continue;
        };
        let set = &labels[&features.dataset_ids()[i]];
        for task in &config.tasks {
            if let Some(col) = set.task_index(task) {
                if set.get(l_row, col) != crate::data::Label::Missing {
                    labeled_cells += 1;
                }
            }
        }
    }
    if labeled_cells == 0 {
        return Err(ProbeError::Data(
            "no labeled cell among the configured datasets and tasks".into(),
        ));
    }

    let evaluate = |m: &ProbeModel| {
        probe_objective_resolved(m, features, labels, &cohort, &weights, config.lambda)
    };

    let (mut current, mut grad) = evaluate(&model)?;
    if !current.loss.is_finite() {
        return Err(ProbeError::Training { iteration: 0 });
    }

    let mut trace = TrainingTrace {
        points: vec![TracePoint {
            iter: 0,
            loss: current.loss,
            data_term: current.data_term,
            reg_term: current.reg_term,
        }],
        final_loss: current.loss,
        iterations: 0,
        converged: false,
    };

    let mut lr = config.learning_rate;
    let max_lr = config.learning_rate * 64.0;
    let mut converged = false;
    let mut iter = 0;
    while iter < config.max_iters {
        iter += 1;
        if grad.max_abs() <= config.grad_tol {
            converged = true;
            break;
        }

        // Backtracking: halve the step until the loss does not increase.
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = step(&model, &grad, lr);
            let (next, next_grad) = evaluate(&candidate)?;
            if !next.loss.is_finite() {
                return Err(ProbeError::Training { iteration: iter });
            }
            if next.loss <= current.loss {
                model = candidate;
                current = next;
                grad = next_grad;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            // Step size underflowed; no descent direction left numerically.
            converged = true;
            break;
        }
        // Gentle recovery so a single bad region does not pin the rate down.
        lr = (lr * 1.25).min(max_lr);

        if iter % config.log_every == 0 {
            trace.points.push(TracePoint {
                iter,
                loss: current.loss,
                data_term: current.data_term,
                reg_term: current.reg_term,
            });
        }
    }

    if trace.points.last().map(|p| p.iter) != Some(iter) {
        trace.points.push(TracePoint {
            iter,
            loss: current.loss,
            data_term: current.data_term,
            reg_term: current.reg_term,
        });
    }
    trace.final_loss = current.loss;
    trace.iterations = iter;
    trace.converged = converged;
    Ok((model, trace))
}

/// Positive counts pooled over all configured datasets, feeding the
/// balancing formula.
fn pooled_task_weights(
    config: &ProbeConfig,
    labels: &BTreeMap<String, LabelSet>,
) -> Result<TaskWeights, ProbeError> {
    let mut counts = vec![0usize; config.tasks.len()];
    for ds in &config.datasets {
        if let Some(set) = labels.get(ds) {
            let c = dataset_counts(set);
            for (t_idx, task) in config.tasks.iter().enumerate() {
                if let Some(i) = c.tasks.iter().position(|t| t == task) {
                    counts[t_idx] += c.positive[i];
                }
            }
        }
    }
    task_weights(&counts)
}

fn step(model: &ProbeModel, grad: &ProbeGradient, lr: f64) -> ProbeModel {
    let mut next = model.clone();
    for (w, g) in next.weights_flat_mut().iter_mut().zip(&grad.weights) {
        *w -= lr * g;
    }
    for (b, g) in next.biases_flat_mut().iter_mut().zip(&grad.biases) {
        *b -= lr * g;
    }
    next
}

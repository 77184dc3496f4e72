use super::ProbeError;
use serde::{Deserialize, Serialize};

/// Frequency-balanced task weights.
///
/// With per-task positive counts c_t, mean count c-bar, and
/// alpha_t = max_i(c_i) - c_t + c-bar, the weight is
/// w_t = alpha_t / max_i(alpha_i). The least frequent task always receives
/// weight exactly 1 and every weight lies in (0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskWeights {
    pub counts: Vec<f64>,
    pub mean_count: f64,
    pub alpha: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TaskWeights {
    /// Uniform weights, used when balancing is disabled.
    pub fn uniform(n_tasks: usize) -> Self {
        Self {
            counts: vec![0.0; n_tasks],
            mean_count: 0.0,
            alpha: vec![1.0; n_tasks],
            weights: vec![1.0; n_tasks],
        }
    }
}

/// Evaluates the balancing formula on per-task positive counts.
pub fn task_weights(counts: &[usize]) -> Result<TaskWeights, ProbeError> {
    if counts.is_empty() {
        return Err(ProbeError::Argument("empty task list".into()));
    }
    let counts_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let max_count = counts_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean_count = counts_f.iter().sum::<f64>() / counts_f.len() as f64;
    let alpha: Vec<f64> = counts_f.iter().map(|&c| max_count - c + mean_count).collect();
    let max_alpha = alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights = if max_alpha > 0.0 {
        alpha.iter().map(|&a| a / max_alpha).collect()
    } else {
        // All counts zero: alpha is uniformly zero, fall back to uniform.
        vec![1.0; counts.len()]
    };
    Ok(TaskWeights {
        counts: counts_f,
        mean_count,
        alpha,
        weights,
    })
}

use super::{DataError, TaskVocabulary};
use crate::util::valid_id;
use std::collections::BTreeSet;

/// Scores of one model (one seed) on one evaluation dataset.
///
/// Cells are `None` where the model has no output for that task/sample (the
/// availability mask). Present scores are unit-interval. Rows are sorted by
/// `sample_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    model_id: String,
    train_domains: BTreeSet<String>,
    seed: u64,
    eval_dataset_id: String,
    sample_ids: Vec<String>,
    tasks: Vec<String>,
    scores: Vec<Option<f64>>, // row-major
}

impl PredictionSet {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        model_id: impl Into<String>,
        train_domains: BTreeSet<String>,
        seed: u64,
        eval_dataset_id: impl Into<String>,
        sample_ids: Vec<String>,
        tasks: Vec<String>,
        scores: Vec<Option<f64>>,
    ) -> Result<Self, DataError> {
        let model_id = model_id.into();
        let eval_dataset_id = eval_dataset_id.into();
        if !valid_id(&model_id) {
            return Err(DataError::Invalid(format!("invalid model id {model_id:?}")));
        }
        if scores.len() != sample_ids.len() * tasks.len() {
            return Err(DataError::Invalid(format!(
                "score grid is {} cells, expected {} samples x {} tasks",
                scores.len(),
                sample_ids.len(),
                tasks.len()
            )));
        }
        for s in scores.iter().flatten() {
            if !s.is_finite() || !(0.0..=1.0).contains(s) {
                return Err(DataError::Value(format!(
                    "score {s} outside the unit interval in model {model_id:?}"
                )));
            }
        }
        let mut order: Vec<usize> = (0..sample_ids.len()).collect();
        order.sort_by(|&a, &b| sample_ids[a].cmp(&sample_ids[b]));
        for w in order.windows(2) {
            if sample_ids[w[0]] == sample_ids[w[1]] {
                return Err(DataError::Invalid(format!(
                    "duplicate sample id {:?} in predictions of {model_id:?}",
                    sample_ids[w[0]]
                )));
            }
        }
        let n_tasks = tasks.len();
        let sorted_ids: Vec<String> = order.iter().map(|&i| sample_ids[i].clone()).collect();
        let mut sorted_scores = Vec::with_capacity(scores.len());
        for &i in &order {
            sorted_scores.extend_from_slice(&scores[i * n_tasks..(i + 1) * n_tasks]);
        }
        Ok(Self {
            model_id,
            train_domains,
            seed,
            eval_dataset_id,
            sample_ids: sorted_ids,
            tasks,
            scores: sorted_scores,
        })
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn train_domains(&self) -> &BTreeSet<String> {
        &self.train_domains
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn eval_dataset_id(&self) -> &str {
        &self.eval_dataset_id
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn tasks(&self) -> &[String] {
        &self.tasks
    }

    pub fn task_index(&self, task: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t == task)
    }

    pub fn get(&self, row: usize, task_idx: usize) -> Option<f64> {
        self.scores[row * self.tasks.len() + task_idx]
    }

    pub fn row_of(&self, sample_id: &str) -> Option<usize> {
        self.sample_ids
            .binary_search_by(|id| id.as_str().cmp(sample_id))
            .ok()
    }

    /// Whether the model emits this task at all (any present cell).
    pub fn has_head(&self, task: &str) -> bool {
        match self.task_index(task) {
            None => false,
            Some(t) => (0..self.sample_ids.len()).any(|r| self.get(r, t).is_some()),
        }
    }

    /// Vocabulary-ordered copy, padding absent tasks with empty columns.
    pub fn conform_to(&self, vocab: &TaskVocabulary) -> Result<Self, DataError> {
        for t in &self.tasks {
            if !vocab.contains(t) {
                return Err(DataError::UnknownTask { task: t.clone() });
            }
        }
        let mut scores = Vec::with_capacity(self.sample_ids.len() * vocab.len());
        for row in 0..self.sample_ids.len() {
            for task in vocab.tasks() {
                scores.push(self.task_index(task).and_then(|t| self.get(row, t)));
            }
        }
        Ok(Self {
            model_id: self.model_id.clone(),
            train_domains: self.train_domains.clone(),
            seed: self.seed,
            eval_dataset_id: self.eval_dataset_id.clone(),
            sample_ids: self.sample_ids.clone(),
            tasks: vocab.tasks().to_vec(),
            scores,
        })
    }
}

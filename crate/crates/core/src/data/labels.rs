use super::{DataError, TaskVocabulary};
use crate::util::valid_id;
use serde::{Deserialize, Serialize};

/// Tri-state label cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Pos,
    Neg,
    Missing,
}

/// Harmonized labels for one dataset: samples x tasks in {POS, NEG, MISSING}.
///
/// Rows are sorted lexicographically by `sample_id`; columns follow the study
/// vocabulary order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    dataset_id: String,
    sample_ids: Vec<String>,
    tasks: Vec<String>,
    values: Vec<Label>, // row-major, |sample_ids| x |tasks|
}

impl LabelSet {
    pub fn new(
        dataset_id: impl Into<String>,
        sample_ids: Vec<String>,
        tasks: Vec<String>,
        values: Vec<Label>,
    ) -> Result<Self, DataError> {
        let dataset_id = dataset_id.into();
        if !valid_id(&dataset_id) {
            return Err(DataError::Invalid(format!(
                "invalid dataset id {dataset_id:?}"
            )));
        }
        for id in &sample_ids {
            if !valid_id(id) {
                return Err(DataError::Invalid(format!("invalid sample id {id:?}")));
            }
        }
        if values.len() != sample_ids.len() * tasks.len() {
            return Err(DataError::Invalid(format!(
                "label grid is {} cells, expected {} samples x {} tasks",
                values.len(),
                sample_ids.len(),
                tasks.len()
            )));
        }
        // Sort rows by sample id; reject duplicates.
        let mut order: Vec<usize> = (0..sample_ids.len()).collect();
        order.sort_by(|&a, &b| sample_ids[a].cmp(&sample_ids[b]));
        for w in order.windows(2) {
            if sample_ids[w[0]] == sample_ids[w[1]] {
                return Err(DataError::Invalid(format!(
                    "duplicate sample id {:?} in dataset {dataset_id:?}",
                    sample_ids[w[0]]
                )));
            }
        }
        let n_tasks = tasks.len();
        let sorted_ids: Vec<String> = order.iter().map(|&i| sample_ids[i].clone()).collect();
        let mut sorted_values = Vec::with_capacity(values.len());
        for &i in &order {
            sorted_values.extend_from_slice(&values[i * n_tasks..(i + 1) * n_tasks]);
        }
        Ok(Self {
            dataset_id,
            sample_ids: sorted_ids,
            tasks,
            values: sorted_values,
        })
    }

    pub fn dataset_id(&self) -> &str {
        &self.dataset_id
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn tasks(&self) -> &[String] {
        &self.tasks
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn task_index(&self, task: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t == task)
    }

    pub fn get(&self, row: usize, task_idx: usize) -> Label {
        self.values[row * self.tasks.len() + task_idx]
    }

    pub fn row_of(&self, sample_id: &str) -> Option<usize> {
        self.sample_ids
            .binary_search_by(|id| id.as_str().cmp(sample_id))
            .ok()
    }

    /// Whether the task column exists and has at least one non-missing cell.
    pub fn task_observed(&self, task: &str) -> bool {
        match self.task_index(task) {
            None => false,
            Some(t) => (0..self.n_samples()).any(|r| self.get(r, t) != Label::Missing),
        }
    }

    /// Restricts the columns to `vocab`, adding all-missing columns for tasks
    /// the set does not carry. Column order becomes the vocabulary order.
    pub fn conform_to(&self, vocab: &TaskVocabulary) -> Result<Self, DataError> {
        for t in &self.tasks {
            if !vocab.contains(t) {
                return Err(DataError::UnknownTask { task: t.clone() });
            }
        }
        let mut values = Vec::with_capacity(self.n_samples() * vocab.len());
        for row in 0..self.n_samples() {
            for task in vocab.tasks() {
                values.push(match self.task_index(task) {
                    Some(t) => self.get(row, t),
                    None => Label::Missing,
                });
            }
        }
        Ok(Self {
            dataset_id: self.dataset_id.clone(),
            sample_ids: self.sample_ids.clone(),
            tasks: vocab.tasks().to_vec(),
            values,
        })
    }
}

/// Positive/negative tallies per task, excluding MISSING cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskCounts {
    pub tasks: Vec<String>,
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

impl TaskCounts {
    pub fn total(&self, task_idx: usize) -> usize {
        self.positive[task_idx] + self.negative[task_idx]
    }
}

/// Per-task positive/negative counts of a label set. MISSING cells are
/// excluded from both tallies.
pub fn dataset_counts(labels: &LabelSet) -> TaskCounts {
    let n_tasks = labels.tasks().len();
    let mut positive = vec![0usize; n_tasks];
    let mut negative = vec![0usize; n_tasks];
    for row in 0..labels.n_samples() {
        for t in 0..n_tasks {
            match labels.get(row, t) {
                Label::Pos => positive[t] += 1,
                Label::Neg => negative[t] += 1,
                Label::Missing => {}
            }
        }
    }
    TaskCounts {
        tasks: labels.tasks().to_vec(),
        positive,
        negative,
    }
}

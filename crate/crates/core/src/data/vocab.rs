use super::DataError;
use crate::util::valid_id;
use serde::{Deserialize, Serialize};

/// The canonical pathology tasks shared by the public chest X-ray datasets.
pub const DEFAULT_TASKS: [&str; 18] = [
    "Atelectasis",
    "Cardiomegaly",
    "Consolidation",
    "Edema",
    "Effusion",
    "Emphysema",
    "Enlarged Cardiomediastinum",
    "Fibrosis",
    "Fracture",
    "Hernia",
    "Infiltration",
    "Lung Lesion",
    "Lung Opacity",
    "Mass",
    "Nodule",
    "Pleural_Thickening",
    "Pneumonia",
    "Pneumothorax",
];

/// Ordered list of canonical task names for a study.
///
/// The order is fixed at construction and shared by every matrix in the
/// study; task columns in label and prediction sets follow it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct TaskVocabulary {
    tasks: Vec<String>,
}

impl TaskVocabulary {
    pub fn new<I, S>(tasks: I) -> Result<Self, DataError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tasks: Vec<String> = tasks.into_iter().map(Into::into).collect();
        if tasks.is_empty() {
            return Err(DataError::Invalid("task vocabulary is empty".into()));
        }
        for t in &tasks {
            if !valid_id(t) {
                return Err(DataError::Invalid(format!("invalid task name {t:?}")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &tasks {
            if !seen.insert(t.clone()) {
                return Err(DataError::Invalid(format!("duplicate task name {t:?}")));
            }
        }
        Ok(Self { tasks })
    }

    /// The 18-task canonical vocabulary.
    pub fn default_vocabulary() -> Self {
        Self::new(DEFAULT_TASKS).expect("default vocabulary is valid")
    }

    pub fn tasks(&self) -> &[String] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn index_of(&self, task: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t == task)
    }

    pub fn contains(&self, task: &str) -> bool {
        self.index_of(task).is_some()
    }
}

impl TryFrom<Vec<String>> for TaskVocabulary {
    type Error = DataError;
    fn try_from(v: Vec<String>) -> Result<Self, DataError> {
        Self::new(v)
    }
}

impl From<TaskVocabulary> for Vec<String> {
    fn from(v: TaskVocabulary) -> Vec<String> {
        v.tasks
    }
}

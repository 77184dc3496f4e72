use super::{DataError, TaskVocabulary};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Mapping from a dataset's raw source labels onto the canonical tasks.
///
/// `hierarchy` maps a child raw label to its parent raw label; children are
/// flattened to their top-level ancestor before `entries` is consulted.
/// Labels listed in `ignore` are dropped without error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub dataset_id: String,
    pub entries: BTreeMap<String, String>,
    #[serde(default)]
    pub hierarchy: BTreeMap<String, String>,
    #[serde(default)]
    pub ignore: BTreeSet<String>,
}

impl LabelMap {
    pub fn new(
        dataset_id: impl Into<String>,
        entries: BTreeMap<String, String>,
        hierarchy: BTreeMap<String, String>,
        ignore: BTreeSet<String>,
    ) -> Result<Self, DataError> {
        let map = Self {
            dataset_id: dataset_id.into(),
            entries,
            hierarchy,
            ignore,
        };
        map.check_acyclic()?;
        Ok(map)
    }

    /// Identity map for already-canonical tables: each vocabulary task maps
    /// to itself.
    pub fn identity(dataset_id: impl Into<String>, vocab: &TaskVocabulary) -> Self {
        let entries = vocab
            .tasks()
            .iter()
            .map(|t| (t.clone(), t.clone()))
            .collect();
        Self {
            dataset_id: dataset_id.into(),
            entries,
            hierarchy: BTreeMap::new(),
            ignore: BTreeSet::new(),
        }
    }

    /// Every mapping target must exist in the vocabulary.
    pub fn validate(&self, vocab: &TaskVocabulary) -> Result<(), DataError> {
        for target in self.entries.values() {
            if !vocab.contains(target) {
                return Err(DataError::UnknownTask {
                    task: target.clone(),
                });
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<(), DataError> {
        for start in self.hierarchy.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = start.as_str();
            while let Some(parent) = self.hierarchy.get(cur) {
                if !seen.insert(cur.to_string()) {
                    return Err(DataError::Cycle {
                        label: start.clone(),
                    });
                }
                cur = parent;
            }
        }
        Ok(())
    }

    /// Follows the hierarchy from `raw` to its top-level ancestor.
    pub fn flatten<'a>(&'a self, raw: &'a str) -> Result<&'a str, DataError> {
        let mut seen = BTreeSet::new();
        let mut cur = raw;
        while let Some(parent) = self.hierarchy.get(cur) {
            if !seen.insert(cur) {
                return Err(DataError::Cycle {
                    label: raw.to_string(),
                });
            }
            cur = parent;
        }
        Ok(cur)
    }

    /// Resolves a raw label to a canonical task, or `None` if it is ignorable.
    pub fn resolve(&self, raw: &str) -> Result<Option<&str>, DataError> {
        if self.ignore.contains(raw) {
            return Ok(None);
        }
        let top = self.flatten(raw)?;
        if self.ignore.contains(top) {
            return Ok(None);
        }
        match self.entries.get(top) {
            Some(task) => Ok(Some(task.as_str())),
            None => Err(DataError::Harmonization {
                dataset: self.dataset_id.clone(),
                label: raw.to_string(),
            }),
        }
    }
}

use super::{DataError, Label, LabelMap, LabelSet, TaskVocabulary, UncertainPolicy};
use std::collections::BTreeMap;

/// State of a raw label mention before harmonization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawState {
    Pos,
    Neg,
    Uncertain,
}

/// One pre-harmonization row: a raw label mentioned for a sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLabelRow {
    pub sample_id: String,
    pub raw_label: String,
    pub state: RawState,
}

/// A dataset's raw label table plus the source-level policy flags.
///
/// `declared_samples` extends the sample universe beyond the ids mentioned in
/// `rows`; with `exhaustive_negative` sources this is how all-negative
/// samples enter the set at all.
#[derive(Debug, Clone, Default)]
pub struct RawLabelTable {
    pub rows: Vec<RawLabelRow>,
    pub declared_samples: Vec<String>,
    pub exhaustive_negative: bool,
}

/// Harmonizes a raw label table onto the canonical vocabulary.
///
/// Child labels are flattened to their top-level ancestor before mapping.
/// Tasks never mentioned for a sample stay MISSING unless the source is
/// declared exhaustive-negative, in which case they are NEG. When duplicate
/// rows conflict at the same cell, POS wins over NEG, and both win over an
/// explicit uncertain-resolved MISSING: a finding mentioned anywhere counts.
pub fn harmonize_labels(
    raw: &RawLabelTable,
    map: &LabelMap,
    vocab: &TaskVocabulary,
    policy: UncertainPolicy,
) -> Result<LabelSet, DataError> {
    map.validate(vocab)?;

    let mut universe: Vec<String> = raw
        .declared_samples
        .iter()
        .chain(raw.rows.iter().map(|r| &r.sample_id))
        .cloned()
        .collect();
    universe.sort();
    universe.dedup();
    let row_of: BTreeMap<&str, usize> = universe
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let n_tasks = vocab.len();
    let default = if raw.exhaustive_negative {
        Label::Neg
    } else {
        Label::Missing
    };
    let mut values = vec![default; universe.len() * n_tasks];
    // Tracks which cells were explicitly assigned, so the POS > NEG > MISSING
    // precedence only applies between explicit mentions.
    let mut assigned = vec![false; universe.len() * n_tasks];

    for row in &raw.rows {
        let Some(task) = map.resolve(&row.raw_label)? else {
            continue; // ignorable label
        };
        let t = vocab
            .index_of(task)
            .expect("validated mapping target in vocabulary");
        let r = row_of[row.sample_id.as_str()];
        let cell = r * n_tasks + t;
        let state = match row.state {
            RawState::Pos => Label::Pos,
            RawState::Neg => Label::Neg,
            RawState::Uncertain => match policy {
                UncertainPolicy::Missing => Label::Missing,
                UncertainPolicy::Pos => Label::Pos,
                UncertainPolicy::Neg => Label::Neg,
            },
        };
        if assigned[cell] {
            values[cell] = resolve_conflict(values[cell], state);
        } else {
            values[cell] = state;
            assigned[cell] = true;
        }
    }

    LabelSet::new(
        map.dataset_id.clone(),
        universe,
        vocab.tasks().to_vec(),
        values,
    )
}

fn precedence(l: Label) -> u8 {
    match l {
        Label::Pos => 2,
        Label::Neg => 1,
        Label::Missing => 0,
    }
}

fn resolve_conflict(a: Label, b: Label) -> Label {
    if precedence(b) > precedence(a) {
        b
    } else {
        a
    }
}

//! CSV readers and writers for the on-disk study formats.
//!
//! Label CSV: `sample_id,<task1>,...` with cells in {1,0,U,empty}; empty is
//! MISSING and `U` resolves through the study's uncertain policy.
//! Prediction CSV: same header, unit-interval decimals or empty cells.
//! Feature CSV: `sample_id,dataset_id,f0,...,f{D-1}`.

use super::{
    DataError, FeatureSet, Label, LabelSet, PredictionSet, RawLabelRow, RawLabelTable, RawState,
    UncertainPolicy,
};
use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

fn io_err(path: &Path, source: std::io::Error) -> DataError {
    DataError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, source: csv::Error) -> DataError {
    DataError::Csv {
        path: path.display().to_string(),
        source,
    }
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, DataError> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_err(path, e))
}

fn header_tasks(path: &Path, headers: &csv::StringRecord) -> Result<Vec<String>, DataError> {
    let mut cols = headers.iter();
    match cols.next() {
        Some("sample_id") => {}
        other => {
            return Err(DataError::Invalid(format!(
                "{}: first column must be sample_id, found {other:?}",
                path.display()
            )))
        }
    }
    Ok(cols.map(|c| c.to_string()).collect())
}

/// Reads a harmonized label CSV. `U` cells resolve through `policy`.
pub fn read_label_csv(
    path: &Path,
    dataset_id: &str,
    policy: UncertainPolicy,
) -> Result<LabelSet, DataError> {
    let mut rdr = reader(path)?;
    let tasks = header_tasks(path, rdr.headers().map_err(|e| csv_err(path, e))?)?;
    let mut sample_ids = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let mut fields = record.iter();
        let id = fields.next().unwrap_or_default().to_string();
        sample_ids.push(id);
        for cell in fields {
            values.push(match cell.trim() {
                "1" => Label::Pos,
                "0" => Label::Neg,
                "" => Label::Missing,
                "U" | "u" => match policy {
                    UncertainPolicy::Missing => Label::Missing,
                    UncertainPolicy::Pos => Label::Pos,
                    UncertainPolicy::Neg => Label::Neg,
                },
                other => {
                    return Err(DataError::Invalid(format!(
                        "{}: label cell {other:?} (expected 1, 0, U, or empty)",
                        path.display()
                    )))
                }
            });
        }
    }
    LabelSet::new(dataset_id, sample_ids, tasks, values)
}

/// Writes a label CSV: POS=1, NEG=0, MISSING=empty.
pub fn write_label_csv(labels: &LabelSet, path: &Path) -> Result<(), DataError> {
    let mut out = String::new();
    out.push_str("sample_id");
    for t in labels.tasks() {
        out.push(',');
        out.push_str(t);
    }
    out.push('\n');
    for (r, id) in labels.sample_ids().iter().enumerate() {
        out.push_str(id);
        for t in 0..labels.tasks().len() {
            out.push(',');
            match labels.get(r, t) {
                Label::Pos => out.push('1'),
                Label::Neg => out.push('0'),
                Label::Missing => {}
            }
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Reads a raw (pre-harmonization) label CSV: `sample_id,raw_label,state`.
pub fn read_raw_label_csv(path: &Path) -> Result<Vec<RawLabelRow>, DataError> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let expected = ["sample_id", "raw_label", "state"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(DataError::Invalid(format!(
            "{}: raw label header must be sample_id,raw_label,state",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let state = match record.get(2).unwrap_or_default().trim() {
            "1" => RawState::Pos,
            "0" => RawState::Neg,
            "U" | "u" => RawState::Uncertain,
            other => {
                return Err(DataError::Invalid(format!(
                    "{}: raw state {other:?} (expected 1, 0, or U)",
                    path.display()
                )))
            }
        };
        rows.push(RawLabelRow {
            sample_id: record.get(0).unwrap_or_default().to_string(),
            raw_label: record.get(1).unwrap_or_default().to_string(),
            state,
        });
    }
    Ok(rows)
}

/// Reads a prediction CSV into a `PredictionSet` with the given metadata.
pub fn read_prediction_csv(
    path: &Path,
    model_id: &str,
    train_domains: BTreeSet<String>,
    seed: u64,
    eval_dataset_id: &str,
) -> Result<PredictionSet, DataError> {
    let mut rdr = reader(path)?;
    let tasks = header_tasks(path, rdr.headers().map_err(|e| csv_err(path, e))?)?;
    let mut sample_ids = Vec::new();
    let mut scores = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let mut fields = record.iter();
        sample_ids.push(fields.next().unwrap_or_default().to_string());
        for cell in fields {
            let cell = cell.trim();
            if cell.is_empty() {
                scores.push(None);
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    DataError::Invalid(format!(
                        "{}: score cell {cell:?} is not a number",
                        path.display()
                    ))
                })?;
                scores.push(Some(v));
            }
        }
    }
    PredictionSet::new(
        model_id,
        train_domains,
        seed,
        eval_dataset_id,
        sample_ids,
        tasks,
        scores,
    )
}

/// Writes a prediction CSV; absent cells are empty.
pub fn write_prediction_csv(predictions: &PredictionSet, path: &Path) -> Result<(), DataError> {
    let mut out = String::new();
    out.push_str("sample_id");
    for t in predictions.tasks() {
        out.push(',');
        out.push_str(t);
    }
    out.push('\n');
    for (r, id) in predictions.sample_ids().iter().enumerate() {
        out.push_str(id);
        for t in 0..predictions.tasks().len() {
            out.push(',');
            if let Some(v) = predictions.get(r, t) {
                out.push_str(&format!("{v}"));
            }
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Reads a feature CSV: `sample_id,dataset_id,f0,...`.
pub fn read_feature_csv(path: &Path) -> Result<FeatureSet, DataError> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 3 || cols[0] != "sample_id" || cols[1] != "dataset_id" {
        return Err(DataError::Invalid(format!(
            "{}: feature header must start with sample_id,dataset_id,f0,...",
            path.display()
        )));
    }
    let dim = cols.len() - 2;
    let mut sample_ids = Vec::new();
    let mut dataset_ids = Vec::new();
    let mut data = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        sample_ids.push(record.get(0).unwrap_or_default().to_string());
        dataset_ids.push(record.get(1).unwrap_or_default().to_string());
        for i in 0..dim {
            let cell = record.get(2 + i).unwrap_or_default();
            let v: f64 = cell.parse().map_err(|_| {
                DataError::Invalid(format!(
                    "{}: feature cell {cell:?} is not a number",
                    path.display()
                ))
            })?;
            data.push(v);
        }
    }
    FeatureSet::new(sample_ids, dataset_ids, dim, data)
}

/// Writes a feature CSV.
pub fn write_feature_csv(features: &FeatureSet, path: &Path) -> Result<(), DataError> {
    let mut out = String::new();
    out.push_str("sample_id,dataset_id");
    for i in 0..features.dim() {
        out.push_str(&format!(",f{i}"));
    }
    out.push('\n');
    for i in 0..features.n_samples() {
        out.push_str(&features.sample_ids()[i]);
        out.push(',');
        out.push_str(&features.dataset_ids()[i]);
        for v in features.row(i) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Builds a `RawLabelTable` from a raw CSV plus optional declared samples.
pub fn read_raw_label_table(
    raw_csv: &Path,
    declared_samples: Option<&Path>,
    exhaustive_negative: bool,
) -> Result<RawLabelTable, DataError> {
    let rows = read_raw_label_csv(raw_csv)?;
    let declared = match declared_samples {
        None => Vec::new(),
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| io_err(p, e))?
            .lines()
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect(),
    };
    Ok(RawLabelTable {
        rows,
        declared_samples: declared,
        exhaustive_negative,
    })
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(bytes).map_err(|e| io_err(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn label_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        let set = LabelSet::new(
            "d1",
            vec!["s1".into(), "s2".into()],
            vec!["A".into(), "B".into()],
            vec![Label::Pos, Label::Missing, Label::Neg, Label::Pos],
        )
        .unwrap();
        write_label_csv(&set, &path).unwrap();
        let back = read_label_csv(&path, "d1", UncertainPolicy::Missing).unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn uncertain_cell_resolves_by_policy() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        std::fs::write(&path, "sample_id,A\ns1,U\n").unwrap();
        let m = read_label_csv(&path, "d", UncertainPolicy::Missing).unwrap();
        assert_eq!(m.get(0, 0), Label::Missing);
        let p = read_label_csv(&path, "d", UncertainPolicy::Pos).unwrap();
        assert_eq!(p.get(0, 0), Label::Pos);
    }

    #[test]
    fn prediction_roundtrip_preserves_mask() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.csv");
        let set = PredictionSet::new(
            "m1",
            BTreeSet::from(["d1".to_string()]),
            7,
            "d1",
            vec!["s1".into(), "s2".into()],
            vec!["A".into()],
            vec![Some(0.25), None],
        )
        .unwrap();
        write_prediction_csv(&set, &path).unwrap();
        let back = read_prediction_csv(
            &path,
            "m1",
            BTreeSet::from(["d1".to_string()]),
            7,
            "d1",
        )
        .unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn feature_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let set = FeatureSet::new(
            vec!["s1".into(), "s2".into()],
            vec!["d1".into(), "d1".into()],
            3,
            vec![0.5, -1.25, 3.0, 0.125, 2.5, -0.75],
        )
        .unwrap();
        write_feature_csv(&set, &path).unwrap();
        let back = read_feature_csv(&path).unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn bad_label_cell_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        std::fs::write(&path, "sample_id,A\ns1,maybe\n").unwrap();
        assert!(read_label_csv(&path, "d", UncertainPolicy::Missing).is_err());
    }
}

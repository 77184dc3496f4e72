use crate::util::fmt_sig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A rows x columns report with EMPTY-capable cells.
///
/// EMPTY cells mark combinations whose preconditions fail; each carries a
/// reason keyed by `"row|col"` in `empty_reasons`. Metadata records the
/// metric and the policies in force, and `row_info` optional per-row
/// annotations (for AUC matrices, the model's training domains).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub metric: String,
    pub row_dim: String,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    /// Row-major cells; `None` renders as an empty (white) cell.
    pub cells: Vec<Option<f64>>,
    pub metadata: BTreeMap<String, String>,
    pub empty_reasons: BTreeMap<String, String>,
    #[serde(default)]
    pub row_info: BTreeMap<String, Vec<String>>,
}

impl MatrixReport {
    pub fn new(
        metric: impl Into<String>,
        row_dim: impl Into<String>,
        row_ids: Vec<String>,
        col_ids: Vec<String>,
    ) -> Self {
        let cells = vec![None; row_ids.len() * col_ids.len()];
        Self {
            metric: metric.into(),
            row_dim: row_dim.into(),
            row_ids,
            col_ids,
            cells,
            metadata: BTreeMap::new(),
            empty_reasons: BTreeMap::new(),
            row_info: BTreeMap::new(),
        }
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.col_ids.len() + col]
    }

    pub fn set_cell(&mut self, row: usize, col: usize, value: f64) {
        self.cells[row * self.col_ids.len() + col] = Some(value);
    }

    pub fn set_empty(&mut self, row: usize, col: usize, reason: impl Into<String>) {
        self.cells[row * self.col_ids.len() + col] = None;
        self.empty_reasons.insert(
            format!("{}|{}", self.row_ids[row], self.col_ids[col]),
            reason.into(),
        );
    }

    pub fn get_by_ids(&self, row_id: &str, col_id: &str) -> Option<f64> {
        let r = self.row_ids.iter().position(|r| r == row_id)?;
        let c = self.col_ids.iter().position(|c| c == col_id)?;
        self.cell(r, c)
    }

    pub fn n_filled(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// CSV rendering: `# key=value` header comments (metric and metadata in
    /// sorted order), then a header row and one row per row id. Values carry
    /// six significant digits; EMPTY cells are empty fields.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# metric={}\n", self.metric));
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.row_dim);
        for c in &self.col_ids {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (r, id) in self.row_ids.iter().enumerate() {
            out.push_str(id);
            for c in 0..self.col_ids.len() {
                out.push(',');
                if let Some(v) = self.cell(r, c) {
                    out.push_str(&fmt_sig(v, 6));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the CSV rendering back. Empty reasons and row info are not
    /// part of the CSV and come back empty.
    pub fn from_csv_str(text: &str) -> Result<Self, String> {
        let mut metric = String::new();
        let mut metadata = BTreeMap::new();
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.peek() {
            let Some(rest) = line.strip_prefix("# ") else {
                break;
            };
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| format!("bad comment header {line:?}"))?;
            if k == "metric" {
                metric = v.to_string();
            } else {
                metadata.insert(k.to_string(), v.to_string());
            }
            lines.next();
        }
        let header = lines.next().ok_or("missing header row")?;
        let mut cols = header.split(',');
        let row_dim = cols.next().unwrap_or_default().to_string();
        let col_ids: Vec<String> = cols.map(String::from).collect();
        let mut row_ids = Vec::new();
        let mut cells = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            row_ids.push(fields.next().unwrap_or_default().to_string());
            let mut count = 0;
            for f in fields {
                count += 1;
                if f.is_empty() {
                    cells.push(None);
                } else {
                    cells.push(Some(
                        f.parse::<f64>().map_err(|e| format!("bad cell {f:?}: {e}"))?,
                    ));
                }
            }
            if count != col_ids.len() {
                return Err(format!(
                    "row {:?} has {count} cells, expected {}",
                    row_ids.last().unwrap(),
                    col_ids.len()
                ));
            }
        }
        Ok(Self {
            metric,
            row_dim,
            row_ids,
            col_ids,
            cells,
            metadata,
            empty_reasons: BTreeMap::new(),
            row_info: BTreeMap::new(),
        })
    }
}

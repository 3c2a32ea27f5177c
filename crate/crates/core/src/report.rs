//! Comparison matrices: MAP values with significance markers, laid out as
//! rows of query variants or parameter values against schema columns.
//! Cells keep their display string verbatim so an ingested table re-emits
//! exactly the digits it arrived with.

use crate::schema::SchemaId;
use crate::stats::{compare_to_baseline, StatsError, TopicSample};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

const KNOWN_MARKERS: [&str; 4] = ["", "*", "+", "++"];

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub value: f64,
    /// Rendered verbatim; computed cells use 4 decimals.
    pub display: String,
    /// "", "*", "+" or "++".
    pub marker: String,
}

impl Cell {
    fn render(&self) -> String {
        if self.marker.is_empty() {
            self.display.clone()
        } else {
            format!("{} {}", self.display, self.marker)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    /// Header for the row-label column, e.g. "variant" or "k".
    pub corner: String,
    pub columns: Vec<String>,
    pub row_labels: Vec<String>,
    /// Rectangular: row_labels.len() rows of columns.len() cells.
    pub cells: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixError {
    MissingValue { row: String, column: String },
    MissingTopicSample { row: String, column: String },
    Stats(StatsError),
    Malformed { line: usize, reason: String },
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::MissingValue { row, column } => {
                write!(f, "grid cell ({row}, {column}) has no MAP value")
            }
            MatrixError::MissingTopicSample { row, column } => {
                write!(f, "grid cell ({row}, {column}) has no per-topic sample")
            }
            MatrixError::Stats(e) => write!(f, "{e}"),
            MatrixError::Malformed { line, reason } => {
                write!(f, "matrix csv line {line}: {reason}")
            }
        }
    }
}

impl core::error::Error for MatrixError {}

impl From<StatsError> for MatrixError {
    fn from(e: StatsError) -> Self {
        MatrixError::Stats(e)
    }
}

/// One grid cell's inputs: the aggregate MAP and the per-topic AP sample
/// behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct CellInput {
    pub map: f64,
    pub per_topic_ap: TopicSample,
}

/// Builds a matrix from a (row label, schema) grid of cell inputs. Values
/// render to 4 decimals; markers come from the paired t-test of each
/// schema's per-topic AP against the baseline column within the same row.
/// The baseline column is never marked.
pub fn build_matrix(
    grid: &BTreeMap<(String, SchemaId), CellInput>,
    corner: &str,
    row_labels: &[String],
    columns: &[SchemaId],
    baseline: SchemaId,
) -> Result<ComparisonMatrix, MatrixError> {
    let mut cells = Vec::with_capacity(row_labels.len());
    for row in row_labels {
        let mut per_topic: BTreeMap<SchemaId, TopicSample> = BTreeMap::new();
        for &col in columns {
            let input = grid.get(&(row.clone(), col)).ok_or_else(|| {
                MatrixError::MissingValue { row: row.clone(), column: col.to_string() }
            })?;
            if input.per_topic_ap.is_empty() {
                return Err(MatrixError::MissingTopicSample {
                    row: row.clone(),
                    column: col.to_string(),
                });
            }
            per_topic.insert(col, input.per_topic_ap.clone());
        }
        let tests = compare_to_baseline(&per_topic, baseline)?;
        let row_cells = columns
            .iter()
            .map(|col| {
                let value = grid[&(row.clone(), *col)].map;
                let marker =
                    tests.get(col).map(|r| r.marker.to_string()).unwrap_or_default();
                Cell { value, display: format!("{value:.4}"), marker }
            })
            .collect();
        cells.push(row_cells);
    }
    Ok(ComparisonMatrix {
        corner: corner.to_string(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
        row_labels: row_labels.to_vec(),
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Markdown,
    Plotdata,
}

impl ComparisonMatrix {
    /// Header row of column labels, then one row per label; marked cells
    /// render as "value marker".
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{}", self.corner);
        for col in &self.columns {
            let _ = write!(out, ",{col}");
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let _ = write!(out, "{label}");
            for cell in row {
                let _ = write!(out, ",{}", cell.render());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "| {} |", self.corner);
        for col in &self.columns {
            let _ = write!(out, " {col} |");
        }
        out.push('\n');
        let _ = write!(out, "| --- |");
        for _ in &self.columns {
            let _ = write!(out, " --- |");
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let _ = write!(out, "| {label} |");
            for cell in row {
                let _ = write!(out, " {} |", cell.render());
            }
            out.push('\n');
        }
        out
    }

    /// Long-form triples `row,column,value`, one line per cell, no header.
    pub fn to_plotdata(&self) -> String {
        let mut out = String::new();
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            for (col, cell) in self.columns.iter().zip(row) {
                let _ = writeln!(out, "{label},{col},{}", cell.display);
            }
        }
        out
    }

    pub fn emit(&self, format: EmitFormat) -> String {
        match format {
            EmitFormat::Csv => self.to_csv(),
            EmitFormat::Markdown => self.to_markdown(),
            EmitFormat::Plotdata => self.to_plotdata(),
        }
    }

    /// Parses the CSV layout produced by [`to_csv`](Self::to_csv), keeping
    /// each cell's digits verbatim.
    pub fn parse_csv(text: &str) -> Result<ComparisonMatrix, MatrixError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(MatrixError::Malformed {
            line: 1,
            reason: "empty input".to_string(),
        })?;
        let mut header_cols = header.split(',').map(str::trim);
        let corner = header_cols.next().unwrap_or("").to_string();
        let columns: Vec<String> = header_cols.map(ToString::to_string).collect();
        if columns.is_empty() {
            return Err(MatrixError::Malformed {
                line: 1,
                reason: "header has no schema columns".to_string(),
            });
        }
        let mut row_labels = Vec::new();
        let mut cells = Vec::new();
        for (i, raw) in lines {
            let line = i + 1;
            let mut fields = raw.split(',').map(str::trim);
            let label = fields.next().unwrap_or("").to_string();
            if label.is_empty() {
                return Err(MatrixError::Malformed {
                    line,
                    reason: "row has no label".to_string(),
                });
            }
            let row: Vec<Cell> = fields
                .map(|field| parse_cell(field, line))
                .collect::<Result<_, _>>()?;
            if row.len() != columns.len() {
                return Err(MatrixError::Malformed {
                    line,
                    reason: format!(
                        "row {:?} has {} cells, header has {} columns",
                        label,
                        row.len(),
                        columns.len()
                    ),
                });
            }
            row_labels.push(label);
            cells.push(row);
        }
        if cells.is_empty() {
            return Err(MatrixError::Malformed {
                line: 1,
                reason: "matrix has no data rows".to_string(),
            });
        }
        Ok(ComparisonMatrix { corner, columns, row_labels, cells })
    }
}

fn parse_cell(field: &str, line: usize) -> Result<Cell, MatrixError> {
    let mut parts = field.split_whitespace();
    let display = parts.next().unwrap_or("").to_string();
    let marker = parts.next().unwrap_or("").to_string();
    if parts.next().is_some() || !KNOWN_MARKERS.contains(&marker.as_str()) {
        return Err(MatrixError::Malformed {
            line,
            reason: format!("cell {field:?} is not \"value\" or \"value marker\""),
        });
    }
    let value: f64 = display.parse().map_err(|_| MatrixError::Malformed {
        line,
        reason: format!("cell value {display:?} is not a number"),
    })?;
    Ok(Cell { value, display, marker })
}

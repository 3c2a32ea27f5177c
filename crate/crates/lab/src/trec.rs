//! TREC-side file conventions: the run filename grammar
//! `<tag>.<schema>.<variant>[.<axis><value>].run` and readers/writers for
//! run and qrels files. Filenames encode full cell coordinates, so a report
//! can be reconstructed from a directory listing alone.

use crate::store::{write_atomic, StoreError};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use tarlab_core::bm25::RunParseError;
use tarlab_core::metrics::QrelsParseError;
use tarlab_core::{parse_run, render_run, Axis, Qrels, QueryVariant, RunEntry, SchemaId};

/// Coordinates of one run file. `sweep` holds the axis and the value literal
/// exactly as configured, so "0.75" round-trips without reformatting.
#[derive(Debug, Clone, PartialEq)]
pub struct RunName {
    pub tag: String,
    pub schema: SchemaId,
    pub variant: QueryVariant,
    pub sweep: Option<(Axis, String)>,
}

impl RunName {
    pub fn file_name(&self) -> String {
        match &self.sweep {
            Some((axis, literal)) => {
                format!("{}.{}.{}.{}{}.run", self.tag, self.schema, self.variant, axis, literal)
            }
            None => format!("{}.{}.{}.run", self.tag, self.schema, self.variant),
        }
    }
}

impl fmt::Display for RunName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.file_name())
    }
}

/// Inverse of [`RunName::file_name`]. Tags never contain dots, and schema,
/// variant, and axis names are dot-free, so any dots past the third segment
/// belong to the value literal.
pub fn parse_run_name(name: &str) -> Option<RunName> {
    let stem = name.strip_suffix(".run")?;
    let mut parts = stem.splitn(4, '.');
    let tag = parts.next()?.to_string();
    let schema: SchemaId = parts.next()?.parse().ok()?;
    let variant: QueryVariant = parts.next()?.parse().ok()?;
    let sweep = match parts.next() {
        None => None,
        Some(blob) => {
            // Longest axis name first: "k11.2" must not match axis "b".
            let (axis, literal) = match blob.strip_prefix("k1") {
                Some(rest) => (Axis::K1, rest),
                None => (Axis::B, blob.strip_prefix('b')?),
            };
            literal.parse::<f64>().ok()?;
            Some((axis, literal.to_string()))
        }
    };
    if tag.is_empty() {
        return None;
    }
    Some(RunName { tag, schema, variant, sweep })
}

#[derive(Debug)]
pub enum TrecError {
    Io { path: PathBuf, source: std::io::Error },
    Run { path: PathBuf, source: RunParseError },
    Qrels { path: PathBuf, source: QrelsParseError },
    Store(StoreError),
}

impl fmt::Display for TrecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrecError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            TrecError::Run { path, source } => write!(f, "{}: {source}", path.display()),
            TrecError::Qrels { path, source } => write!(f, "{}: {source}", path.display()),
            TrecError::Store(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for TrecError {}

impl From<StoreError> for TrecError {
    fn from(e: StoreError) -> Self {
        TrecError::Store(e)
    }
}

fn read_text(path: &Path) -> Result<String, TrecError> {
    fs::read_to_string(path).map_err(|source| TrecError::Io { path: path.to_path_buf(), source })
}

pub fn read_run(path: &Path) -> Result<Vec<RunEntry>, TrecError> {
    let text = read_text(path)?;
    parse_run(&text).map_err(|source| TrecError::Run { path: path.to_path_buf(), source })
}

pub fn write_run(path: &Path, entries: &[RunEntry]) -> Result<(), TrecError> {
    Ok(write_atomic(path, &render_run(entries))?)
}

pub fn read_qrels(path: &Path) -> Result<Qrels, TrecError> {
    let text = read_text(path)?;
    Qrels::parse(&text).map_err(|source| TrecError::Qrels { path: path.to_path_buf(), source })
}

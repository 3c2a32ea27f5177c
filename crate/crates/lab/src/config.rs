//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use tarlab_core::{Axis, Bm25Params, QueryVariant, SchemaId};

/// One sweep point: the literal from the config file (reused verbatim in
/// run filenames) and its numeric value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepValue {
    pub literal: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<SweepValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus_dir: Option<PathBuf>,
    pub index_dir: Option<PathBuf>,
    pub topics_dir: Option<PathBuf>,
    pub qrels_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub schemas: Vec<SchemaId>,
    pub variants: Vec<QueryVariant>,
    pub params: Bm25Params,
    pub sweep: Option<SweepSpec>,
    pub cutoff: usize,
    pub tag: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus_dir: None,
            index_dir: None,
            topics_dir: None,
            qrels_path: None,
            output_dir: None,
            schemas: SchemaId::ALL.to_vec(),
            variants: QueryVariant::ALL.to_vec(),
            params: Bm25Params::default(),
            sweep: None,
            cutoff: tarlab_core::bm25::DEFAULT_CUTOFF,
            tag: "bm25".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io { path: PathBuf, message: String },
    Syntax { line: usize, reason: String },
    UnknownKey { line: usize, key: String },
    DuplicateKey { line: usize, key: String },
    InvalidValue { line: usize, key: String, reason: String },
    /// A command needs a key the config never set.
    MissingKey { key: &'static str },
    Invalid { reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            ConfigError::Syntax { line, reason } => write!(f, "config line {line}: {reason}"),
            ConfigError::UnknownKey { line, key } => {
                write!(f, "config line {line}: unknown key {key:?}")
            }
            ConfigError::DuplicateKey { line, key } => {
                write!(f, "config line {line}: duplicate key {key:?}")
            }
            ConfigError::InvalidValue { line, key, reason } => {
                write!(f, "config line {line}: {key}: {reason}")
            }
            ConfigError::MissingKey { key } => write!(f, "config does not set {key}"),
            ConfigError::Invalid { reason } => write!(f, "invalid config: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn parse_list<T: std::str::FromStr>(
    raw: &str,
    line: usize,
    key: &str,
) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    let mut out = Vec::new();
    for item in raw.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(ConfigError::InvalidValue {
                line,
                key: key.to_string(),
                reason: "empty list entry".to_string(),
            });
        }
        out.push(item.parse::<T>().map_err(|e| ConfigError::InvalidValue {
            line,
            key: key.to_string(),
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

fn parse_axis(raw: &str, line: usize) -> Result<Axis, ConfigError> {
    match raw {
        "k1" | "k" => Ok(Axis::K1),
        "b" => Ok(Axis::B),
        other => Err(ConfigError::InvalidValue {
            line,
            key: "sweep_axis".to_string(),
            reason: format!("expected k1 or b, found {other:?}"),
        }),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<String> = Vec::new();
        let mut sweep_axis: Option<Axis> = None;
        let mut sweep_values: Vec<SweepValue> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                reason: "expected key = value".to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
            }
            seen.push(key.to_string());
            let bad = |reason: String| ConfigError::InvalidValue {
                line,
                key: key.to_string(),
                reason,
            };
            match key {
                "corpus_dir" => cfg.corpus_dir = Some(PathBuf::from(value)),
                "index_dir" => cfg.index_dir = Some(PathBuf::from(value)),
                "topics_dir" => cfg.topics_dir = Some(PathBuf::from(value)),
                "qrels_path" => cfg.qrels_path = Some(PathBuf::from(value)),
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                "schemas" => cfg.schemas = parse_list(value, line, key)?,
                "variants" => cfg.variants = parse_list(value, line, key)?,
                "k1" => {
                    cfg.params.k1 = value.parse().map_err(|_| bad("not a number".to_string()))?
                }
                "b" => {
                    cfg.params.b = value.parse().map_err(|_| bad("not a number".to_string()))?
                }
                "cutoff" => {
                    cfg.cutoff = value.parse().map_err(|_| bad("not a count".to_string()))?
                }
                "tag" => cfg.tag = value.to_string(),
                "sweep_axis" => sweep_axis = Some(parse_axis(value, line)?),
                "sweep_values" => {
                    for item in value.split(',') {
                        let literal = item.trim();
                        let parsed: f64 = literal
                            .parse()
                            .map_err(|_| bad(format!("{literal:?} is not a number")))?;
                        sweep_values
                            .push(SweepValue { literal: literal.to_string(), value: parsed });
                    }
                }
                other => {
                    return Err(ConfigError::UnknownKey { line, key: other.to_string() })
                }
            }
        }
        match (sweep_axis, sweep_values.is_empty()) {
            (Some(axis), false) => cfg.sweep = Some(SweepSpec { axis, values: sweep_values }),
            (None, true) => {}
            (Some(_), true) => {
                return Err(ConfigError::Invalid {
                    reason: "sweep_axis set without sweep_values".to_string(),
                })
            }
            (None, false) => {
                return Err(ConfigError::Invalid {
                    reason: "sweep_values set without sweep_axis".to_string(),
                })
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |reason: String| ConfigError::Invalid { reason };
        self.params
            .validate()
            .map_err(|e| invalid(e.to_string()))?;
        if self.schemas.is_empty() {
            return Err(invalid("schemas list is empty".to_string()));
        }
        if self.variants.is_empty() {
            return Err(invalid("variants list is empty".to_string()));
        }
        if self.cutoff == 0 {
            return Err(invalid("cutoff must be at least 1".to_string()));
        }
        if self.tag.is_empty()
            || self.tag.contains(['.', '/', '\\'])
            || self.tag.chars().any(char::is_whitespace)
        {
            return Err(invalid(format!(
                "tag {:?} must be non-empty without '.', '/' or whitespace",
                self.tag
            )));
        }
        if let Some(sweep) = &self.sweep {
            for v in &sweep.values {
                let params = sweep.axis.apply(self.params, v.value);
                params.validate().map_err(|e| {
                    invalid(format!("sweep value {}: {e}", v.literal))
                })?;
            }
        }
        Ok(())
    }

    pub fn corpus_dir(&self) -> Result<&Path, ConfigError> {
        self.corpus_dir.as_deref().ok_or(ConfigError::MissingKey { key: "corpus_dir" })
    }

    pub fn index_dir(&self) -> Result<&Path, ConfigError> {
        self.index_dir.as_deref().ok_or(ConfigError::MissingKey { key: "index_dir" })
    }

    pub fn topics_dir(&self) -> Result<&Path, ConfigError> {
        self.topics_dir.as_deref().ok_or(ConfigError::MissingKey { key: "topics_dir" })
    }

    pub fn qrels_path(&self) -> Result<&Path, ConfigError> {
        self.qrels_path.as_deref().ok_or(ConfigError::MissingKey { key: "qrels_path" })
    }

    pub fn output_dir(&self) -> Result<&Path, ConfigError> {
        self.output_dir.as_deref().ok_or(ConfigError::MissingKey { key: "output_dir" })
    }
}

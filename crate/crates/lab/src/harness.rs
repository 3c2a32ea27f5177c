//! Command layer behind the CLI: each subcommand is a function over
//! [`ExperimentConfig`]. Commands compute every grid cell before writing
//! anything, so output directories never hold a partial grid, and all file
//! writes go through write-then-rename.

use crate::config::{ConfigError, ExperimentConfig};
use crate::ingest::{load_corpus_dir, IngestError};
use crate::store::{write_atomic, write_index, StoreError};
use crate::trec::{parse_run_name, read_qrels, read_run, write_run, RunName, TrecError};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use tarlab_core::index::BuildError;
use tarlab_core::stats::TopicSample;
use tarlab_core::topic::MissingSectionError;
use tarlab_core::{
    build_index, evaluate, make_query, parse_topic_file, search, sweep, AnalysisChain,
    CellInput, ComparisonMatrix, EmitFormat, FieldSchema, MatrixError, MetricReport,
    QueryVariant, RunEntry, SchemaId, StatsError, TTestResult, Topic,
};

#[derive(Debug)]
pub enum LabError {
    Config(ConfigError),
    /// Subcommand invoked in a way the configuration cannot support.
    Usage(String),
    Ingest(IngestError),
    Store(StoreError),
    Trec(TrecError),
    Build(BuildError),
    Topic { path: PathBuf, source: MissingSectionError },
    DuplicateTopic { topic_id: String },
    EmptyTopics { dir: PathBuf },
    NoRuns { dir: PathBuf },
    Stats(StatsError),
    Matrix(MatrixError),
    Io { path: PathBuf, source: std::io::Error },
}

impl LabError {
    /// 1 for usage errors, 2 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Usage(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Config(e) => e.fmt(f),
            LabError::Usage(msg) => f.write_str(msg),
            LabError::Ingest(e) => e.fmt(f),
            LabError::Store(e) => e.fmt(f),
            LabError::Trec(e) => e.fmt(f),
            LabError::Build(e) => e.fmt(f),
            LabError::Topic { path, source } => write!(f, "{}: {source}", path.display()),
            LabError::DuplicateTopic { topic_id } => {
                write!(f, "topic {topic_id} appears in more than one topic file")
            }
            LabError::EmptyTopics { dir } => {
                write!(f, "topics directory {} contains no files", dir.display())
            }
            LabError::NoRuns { dir } => {
                write!(f, "no run files found in {}", dir.display())
            }
            LabError::Stats(e) => e.fmt(f),
            LabError::Matrix(e) => e.fmt(f),
            LabError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for LabError {}

macro_rules! from_error {
    ($variant:ident, $source:ty) => {
        impl From<$source> for LabError {
            fn from(e: $source) -> Self {
                LabError::$variant(e)
            }
        }
    };
}

from_error!(Config, ConfigError);
from_error!(Ingest, IngestError);
from_error!(Store, StoreError);
from_error!(Trec, TrecError);
from_error!(Build, BuildError);
from_error!(Stats, StatsError);
from_error!(Matrix, MatrixError);

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> LabError + '_ {
    move |source| LabError::Io { path: path.to_path_buf(), source }
}

/// Directory holding one schema's index.
pub fn index_dir_for(config: &ExperimentConfig, schema: SchemaId) -> Result<PathBuf, LabError> {
    Ok(config.index_dir()?.join(schema.name()))
}

#[derive(Debug)]
pub struct IndexSummary {
    pub schema: SchemaId,
    pub path: PathBuf,
    pub docs: usize,
    pub avgdl: f64,
}

/// Builds one index per configured schema from the corpus directory.
/// Existing indexes are refused unless `force` is set.
pub fn cmd_index(config: &ExperimentConfig, force: bool) -> Result<Vec<IndexSummary>, LabError> {
    let docs = load_corpus_dir(config.corpus_dir()?)?;
    config
        .schemas
        .par_iter()
        .map(|&schema| {
            let index = build_index(
                docs.iter().cloned(),
                FieldSchema::of(schema),
                AnalysisChain::standard(),
            )?;
            let path = index_dir_for(config, schema)?;
            write_index(&path, &index, force)?;
            Ok(IndexSummary { schema, path, docs: index.n_docs(), avgdl: index.avgdl() })
        })
        .collect()
}

/// Loads and parses every file under the topics directory (recursively),
/// sorted by topic id. An empty directory is an error.
pub fn load_topics(dir: &Path) -> Result<Vec<Topic>, LabError> {
    let mut topics = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| LabError::Io {
            path: e.path().unwrap_or(dir).to_path_buf(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let topic = parse_topic_file(&text)
            .map_err(|source| LabError::Topic { path: path.to_path_buf(), source })?;
        topics.push(topic);
    }
    if topics.is_empty() {
        return Err(LabError::EmptyTopics { dir: dir.to_path_buf() });
    }
    topics.sort_by(|a, b| a.topic_id.cmp(&b.topic_id));
    for pair in topics.windows(2) {
        if pair[0].topic_id == pair[1].topic_id {
            return Err(LabError::DuplicateTopic { topic_id: pair[0].topic_id.clone() });
        }
    }
    Ok(topics)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub name: RunName,
    pub path: PathBuf,
    pub entries: usize,
}

fn queries_for(topics: &[Topic], variant: QueryVariant) -> Vec<(String, tarlab_core::Query)> {
    topics.iter().map(|t| (t.topic_id.clone(), make_query(t, variant))).collect()
}

fn write_all_runs(
    output_dir: &Path,
    cells: Vec<(RunName, Vec<RunEntry>)>,
) -> Result<Vec<RunOutcome>, LabError> {
    cells
        .into_iter()
        .map(|(name, entries)| {
            let path = output_dir.join(name.file_name());
            write_run(&path, &entries)?;
            Ok(RunOutcome { name, path, entries: entries.len() })
        })
        .collect()
}

/// One run file per (schema, variant) cell with the configured parameters.
pub fn cmd_run(config: &ExperimentConfig) -> Result<Vec<RunOutcome>, LabError> {
    let topics = load_topics(config.topics_dir()?)?;
    let output_dir = config.output_dir()?;
    let cells: Vec<(RunName, Vec<RunEntry>)> = config
        .schemas
        .par_iter()
        .map(|&schema| {
            let index = crate::store::read_index(&index_dir_for(config, schema)?)?;
            let mut cells = Vec::new();
            for &variant in &config.variants {
                let mut entries = Vec::new();
                for (topic_id, query) in queries_for(&topics, variant) {
                    entries.extend(search(
                        &index,
                        &topic_id,
                        &query,
                        config.params,
                        config.cutoff,
                        &config.tag,
                    ));
                }
                let name = RunName {
                    tag: config.tag.clone(),
                    schema,
                    variant,
                    sweep: None,
                };
                cells.push((name, entries));
            }
            Ok(cells)
        })
        .collect::<Result<Vec<_>, LabError>>()?
        .into_iter()
        .flatten()
        .collect();
    write_all_runs(output_dir, cells)
}

/// One run file per (value, schema, variant) cell along the configured
/// sweep axis; the other parameter stays at its configured value.
pub fn cmd_sweep(config: &ExperimentConfig) -> Result<Vec<RunOutcome>, LabError> {
    let axis_sweep = config.sweep.as_ref().ok_or_else(|| {
        LabError::Usage("sweep requires sweep_axis and sweep_values in the config".to_string())
    })?;
    let topics = load_topics(config.topics_dir()?)?;
    let output_dir = config.output_dir()?;
    let values: Vec<f64> = axis_sweep.values.iter().map(|v| v.value).collect();
    let cells: Vec<(RunName, Vec<RunEntry>)> = config
        .schemas
        .par_iter()
        .map(|&schema| {
            let index = crate::store::read_index(&index_dir_for(config, schema)?)?;
            let mut cells = Vec::new();
            for &variant in &config.variants {
                let queries = queries_for(&topics, variant);
                let runs = sweep(
                    &index,
                    &queries,
                    axis_sweep.axis,
                    &values,
                    config.params,
                    config.cutoff,
                    &config.tag,
                );
                for (sv, (_, entries)) in axis_sweep.values.iter().zip(runs) {
                    let name = RunName {
                        tag: config.tag.clone(),
                        schema,
                        variant,
                        sweep: Some((axis_sweep.axis, sv.literal.clone())),
                    };
                    cells.push((name, entries));
                }
            }
            Ok(cells)
        })
        .collect::<Result<Vec<_>, LabError>>()?
        .into_iter()
        .flatten()
        .collect();
    write_all_runs(output_dir, cells)
}

/// Run files in `dir` whose names parse, sorted by file name.
pub fn discover_runs(dir: &Path) -> Result<Vec<(RunName, PathBuf)>, LabError> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        if !entry.file_type().map_err(io_err(dir))?.is_file() {
            continue;
        }
        let file_name = entry.file_name();
        let Some(name) = file_name.to_str().and_then(parse_run_name) else {
            continue;
        };
        found.push((name, entry.path()));
    }
    found.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(found)
}

#[derive(Debug)]
pub struct EvalOutcome {
    pub run_path: PathBuf,
    pub text_path: PathBuf,
    pub csv_path: PathBuf,
    pub report: MetricReport,
}

/// Evaluates run files against the configured qrels, writing a text and a
/// CSV report next to each run. With no explicit paths, evaluates every
/// run file in the output directory.
pub fn cmd_eval(config: &ExperimentConfig, runs: &[PathBuf]) -> Result<Vec<EvalOutcome>, LabError> {
    let qrels = read_qrels(config.qrels_path()?)?;
    let paths: Vec<PathBuf> = if runs.is_empty() {
        let output_dir = config.output_dir()?;
        let discovered = discover_runs(output_dir)?;
        if discovered.is_empty() {
            return Err(LabError::NoRuns { dir: output_dir.to_path_buf() });
        }
        discovered.into_iter().map(|(_, p)| p).collect()
    } else {
        runs.to_vec()
    };
    paths
        .iter()
        .map(|path| {
            let entries = read_run(path)?;
            let report = evaluate(&entries, &qrels);
            let text_path = path.with_extension("eval");
            let csv_path = path.with_extension("eval.csv");
            write_atomic(&text_path, &report.render_text())?;
            write_atomic(&csv_path, &report.render_csv())?;
            Ok(EvalOutcome { run_path: path.clone(), text_path, csv_path, report })
        })
        .collect()
}

#[derive(Debug)]
pub struct TTestOutcome {
    pub label_a: String,
    pub label_b: String,
    pub result: TTestResult,
}

fn ap_sample(report: &MetricReport) -> TopicSample {
    report.per_topic.iter().map(|(t, m)| (t.clone(), m.ap)).collect()
}

fn file_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Paired two-sided t-test on per-topic average precision of two runs,
/// evaluated against the configured qrels.
pub fn cmd_ttest(config: &ExperimentConfig, run_a: &Path, run_b: &Path) -> Result<TTestOutcome, LabError> {
    let qrels = read_qrels(config.qrels_path()?)?;
    let a = evaluate(&read_run(run_a)?, &qrels);
    let b = evaluate(&read_run(run_b)?, &qrels);
    let label_a = file_label(run_a);
    let label_b = file_label(run_b);
    let label = format!("{label_a} vs {label_b}");
    let result = tarlab_core::stats::paired_t_by_topic(&label, &ap_sample(&a), &ap_sample(&b))?;
    Ok(TTestOutcome { label_a, label_b, result })
}

fn emit_matrix(
    output_dir: &Path,
    stem: &str,
    matrix: &ComparisonMatrix,
) -> Result<Vec<PathBuf>, LabError> {
    [
        (EmitFormat::Csv, "csv"),
        (EmitFormat::Markdown, "md"),
        (EmitFormat::Plotdata, "plotdata"),
    ]
    .iter()
    .map(|&(format, ext)| {
        let path = output_dir.join(format!("{stem}.{ext}"));
        write_atomic(&path, &matrix.emit(format))?;
        Ok(path)
    })
    .collect()
}

/// Baseline column for significance marking: the baseline schema when it is
/// configured, otherwise the first configured schema.
fn baseline_schema(config: &ExperimentConfig) -> SchemaId {
    if config.schemas.contains(&SchemaId::Baseline) {
        SchemaId::Baseline
    } else {
        config.schemas[0]
    }
}

/// Re-renders an externally supplied MAP matrix without touching run files.
pub fn cmd_report_from_csv(config: &ExperimentConfig, csv: &Path) -> Result<Vec<PathBuf>, LabError> {
    let text = fs::read_to_string(csv).map_err(io_err(csv))?;
    let matrix = ComparisonMatrix::parse_csv(&text)?;
    emit_matrix(config.output_dir()?, "report", &matrix)
}

/// Rebuilds comparison matrices from the run files in the output directory:
/// one variants-by-schemata MAP table for the default runs, plus one
/// values-by-schemata table per (axis, variant) seen in sweep runs. Every
/// table is emitted as csv, markdown, and plotdata.
pub fn cmd_report(config: &ExperimentConfig) -> Result<Vec<PathBuf>, LabError> {
    let qrels = read_qrels(config.qrels_path()?)?;
    let output_dir = config.output_dir()?;
    let runs: Vec<(RunName, PathBuf)> = discover_runs(output_dir)?
        .into_iter()
        .filter(|(name, _)| name.tag == config.tag)
        .collect();
    if runs.is_empty() {
        return Err(LabError::NoRuns { dir: output_dir.to_path_buf() });
    }

    type Grid = BTreeMap<(String, SchemaId), CellInput>;
    let mut default_grid: Grid = BTreeMap::new();
    let mut sweep_grids: BTreeMap<(&'static str, QueryVariant), Grid> = BTreeMap::new();
    let mut sweep_rows: BTreeMap<(&'static str, QueryVariant), Vec<(f64, String)>> = BTreeMap::new();

    for (name, path) in &runs {
        let report = evaluate(&read_run(path)?, &qrels);
        let cell = CellInput { map: report.aggregate.ap, per_topic_ap: ap_sample(&report) };
        match &name.sweep {
            None => {
                default_grid.insert((name.variant.to_string(), name.schema), cell);
            }
            Some((axis, literal)) => {
                let key = (axis.name(), name.variant);
                sweep_grids.entry(key).or_default().insert((literal.clone(), name.schema), cell);
                let rows = sweep_rows.entry(key).or_default();
                let value: f64 = literal.parse().expect("validated by parse_run_name");
                if !rows.iter().any(|(_, l)| l == literal) {
                    rows.push((value, literal.clone()));
                }
            }
        }
    }

    let baseline = baseline_schema(config);
    let mut written = Vec::new();

    if !default_grid.is_empty() {
        let row_labels: Vec<String> = config.variants.iter().map(|v| v.to_string()).collect();
        let matrix =
            tarlab_core::build_matrix(&default_grid, "variant", &row_labels, &config.schemas, baseline)?;
        written.extend(emit_matrix(output_dir, &format!("{}.map", config.tag), &matrix)?);
    }

    for (key, grid) in &sweep_grids {
        let (axis_name, variant) = *key;
        let mut rows = sweep_rows.remove(key).unwrap_or_default();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let row_labels: Vec<String> = rows.into_iter().map(|(_, literal)| literal).collect();
        let matrix =
            tarlab_core::build_matrix(grid, axis_name, &row_labels, &config.schemas, baseline)?;
        let stem = format!("{}.{axis_name}.{variant}.map", config.tag);
        written.extend(emit_matrix(output_dir, &stem, &matrix)?);
    }

    Ok(written)
}

//! Core machinery for screening-style retrieval experiments: a deterministic
//! text-analysis chain, field-schema inverted indexes, BM25 ranking, standard
//! retrieval metrics, and paired significance testing.
//!
//! This crate is `no_std` + `alloc`; all file formats and IO live in the
//! companion `tarlab` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod bm25;
pub mod document;
pub mod index;
pub mod metrics;
pub mod report;
pub mod schema;
pub mod stats;
pub mod topic;

pub use bm25::{parse_run, render_run, search, sweep, Axis, Bm25Params, RunEntry};
pub use analysis::{analyze, tokenize, word_delimit, AnalysisChain, PatternRule, Stage, WordDelimiterFlags};
pub use document::{FieldId, PubMedDocument};
pub use index::{build_index, Index};
pub use metrics::{average_precision, evaluate, interpolated_precision, precision_at_k, MetricReport, Qrels, TopicMetrics};
pub use report::{build_matrix, Cell, CellInput, ComparisonMatrix, EmitFormat, MatrixError};
pub use schema::{FieldSchema, SchemaId};
pub use stats::{compare_to_baseline, marker, paired_t, StatsError, TTestResult};
pub use topic::{clean_query2, flatten_query, make_query, parse_topic_file, Query, QueryVariant, Topic};

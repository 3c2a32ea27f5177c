//! BM25 scoring, ranked search with wildcard expansion, parameter sweeps,
//! and the TREC run-file line format.

use crate::document::pmid_order;
use crate::index::{DocId, Index};
use crate::topic::Query;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Free parameters of the scoring function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvalidParamsError {
    pub params: Bm25Params,
}

impl fmt::Display for InvalidParamsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid BM25 parameters k1={}, b={}: k1 must be >= 0 and b in [0,1]",
            self.params.k1, self.params.b
        )
    }
}

impl core::error::Error for InvalidParamsError {}

impl Bm25Params {
    pub fn validate(self) -> Result<Self, InvalidParamsError> {
        let ok = self.k1.is_finite() && self.k1 >= 0.0 && self.b.is_finite() && (0.0..=1.0).contains(&self.b);
        if ok {
            Ok(self)
        } else {
            Err(InvalidParamsError { params: self })
        }
    }
}

/// Sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    K1,
    B,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::K1 => "k1",
            Axis::B => "b",
        }
    }

    pub fn apply(self, base: Bm25Params, value: f64) -> Bm25Params {
        match self {
            Axis::K1 => Bm25Params { k1: value, ..base },
            Axis::B => Bm25Params { b: value, ..base },
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One TREC run line. Within a topic, ranks are 1..n consecutive and scores
/// non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub topic_id: String,
    pub rank: u32,
    pub pmid: String,
    pub score: f64,
    pub tag: String,
}

/// Default rank-list depth, the TREC convention.
pub const DEFAULT_CUTOFF: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidDocIdError {
    pub docid: DocId,
    pub n_docs: usize,
}

impl fmt::Display for InvalidDocIdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "docid {} out of range (index holds {} documents)", self.docid, self.n_docs)
    }
}

impl core::error::Error for InvalidDocIdError {}

/// The non-negative idf variant: ln(1 + (N - df + 0.5) / (df + 0.5)).
fn idf(n_docs: usize, df: usize) -> f64 {
    let n = n_docs as f64;
    let df = df as f64;
    libm::log(1.0 + (n - df + 0.5) / (df + 0.5))
}

fn term_weight(tf: u32, doc_len: u32, avgdl: f64, params: Bm25Params) -> f64 {
    let tf = f64::from(tf);
    let norm = 1.0 - params.b + params.b * f64::from(doc_len) / avgdl;
    tf * (params.k1 + 1.0) / (tf + params.k1 * norm)
}

/// BM25 score of one document for already-analyzed query terms. Duplicate
/// terms act as a query-term-frequency multiplier; terms absent from the
/// index contribute zero.
pub fn score<S: AsRef<str>>(
    index: &Index,
    analyzed_terms: &[S],
    params: Bm25Params,
    docid: DocId,
) -> Result<f64, InvalidDocIdError> {
    let doc = index
        .doc(docid)
        .ok_or(InvalidDocIdError { docid, n_docs: index.n_docs() })?;
    let mut qtf: BTreeMap<&str, u32> = BTreeMap::new();
    for term in analyzed_terms {
        *qtf.entry(term.as_ref()).or_insert(0) += 1;
    }
    let avgdl = index.avgdl();
    let mut total = 0.0;
    for (term, q) in qtf {
        let postings = index.postings(term);
        if postings.is_empty() {
            continue;
        }
        let tf = match postings.binary_search_by_key(&docid, |&(d, _)| d) {
            Ok(i) => postings[i].1,
            Err(_) => continue,
        };
        total += f64::from(q)
            * idf(index.n_docs(), postings.len())
            * term_weight(tf, doc.len, avgdl, params);
    }
    Ok(total)
}

/// Matches `text` against a pattern whose only metacharacter is '*'
/// (any run of characters, possibly empty).
fn glob_match(pattern: &str, text: &str) -> bool {
    let segments: Vec<&str> = pattern.split('*').collect();
    if segments.len() == 1 {
        return pattern == text;
    }
    let first = segments[0];
    let last = segments[segments.len() - 1];
    if !text.starts_with(first) || !text.ends_with(last) {
        return false;
    }
    if text.len() < first.len() + last.len() {
        return false;
    }
    let mut pos = first.len();
    let end = text.len() - last.len();
    for segment in &segments[1..segments.len() - 1] {
        if segment.is_empty() {
            continue;
        }
        match text[pos..end].find(segment) {
            Some(i) => pos += i + segment.len(),
            None => return false,
        }
    }
    true
}

/// Query-term weights: analyzed terms with multiplicities, wildcard terms
/// expanded against the dictionary. Expansion uses the prefix before the
/// first '*' (capped by the index), then filters on the whole pattern; each
/// expanded term is scored with its own document frequency.
fn query_weights(index: &Index, query: &Query) -> BTreeMap<String, u32> {
    use crate::analysis::Stage;
    let chain = index.chain();
    let lowercases = chain.stages().contains(&Stage::Lowercase);
    let mut qtf: BTreeMap<String, u32> = BTreeMap::new();
    for raw in &query.terms {
        if raw.contains('*') {
            let pattern = if lowercases { raw.to_lowercase() } else { raw.clone() };
            let prefix = &pattern[..pattern.find('*').expect("wildcard present")];
            for candidate in index.expand_prefix(prefix) {
                if glob_match(&pattern, candidate) {
                    *qtf.entry(candidate.to_string()).or_insert(0) += 1;
                }
            }
        } else {
            for term in chain.analyze(raw) {
                *qtf.entry(term).or_insert(0) += 1;
            }
        }
    }
    qtf
}

/// Ranks every document scoring above zero: score descending, pmid ascending
/// on ties, truncated to `cutoff`, ranks assigned 1..n.
pub fn search(
    index: &Index,
    topic_id: &str,
    query: &Query,
    params: Bm25Params,
    cutoff: usize,
    tag: &str,
) -> Vec<RunEntry> {
    let qtf = query_weights(index, query);
    let avgdl = index.avgdl();
    let mut scores: BTreeMap<DocId, f64> = BTreeMap::new();
    for (term, q) in &qtf {
        let postings = index.postings(term);
        if postings.is_empty() {
            continue;
        }
        let w = f64::from(*q) * idf(index.n_docs(), postings.len());
        for &(docid, tf) in postings {
            let doc_len = index.doc(docid).expect("posting docid in doc table").len;
            *scores.entry(docid).or_insert(0.0) += w * term_weight(tf, doc_len, avgdl, params);
        }
    }
    let mut ranked: Vec<(DocId, f64)> =
        scores.into_iter().filter(|&(_, s)| s > 0.0).collect();
    ranked.sort_by(|a, b| {
        b.1.total_cmp(&a.1).then_with(|| {
            let pa = &index.doc(a.0).expect("scored docid").pmid;
            let pb = &index.doc(b.0).expect("scored docid").pmid;
            pmid_order(pa, pb)
        })
    });
    ranked.truncate(cutoff);
    ranked
        .into_iter()
        .enumerate()
        .map(|(i, (docid, score))| RunEntry {
            topic_id: topic_id.to_string(),
            rank: (i + 1) as u32,
            pmid: index.doc(docid).expect("scored docid").pmid.clone(),
            score,
            tag: tag.to_string(),
        })
        .collect()
}

/// One complete run per axis value, in the given order; the fixed parameter
/// comes from `base`. Tags are unchanged, so the default cell of a sweep is
/// byte-identical to a standalone default run.
pub fn sweep(
    index: &Index,
    queries: &[(String, Query)],
    axis: Axis,
    values: &[f64],
    base: Bm25Params,
    cutoff: usize,
    tag: &str,
) -> Vec<(f64, Vec<RunEntry>)> {
    values
        .iter()
        .map(|&value| {
            let params = axis.apply(base, value);
            let mut run = Vec::new();
            for (topic_id, query) in queries {
                run.extend(search(index, topic_id, query, params, cutoff, tag));
            }
            (value, run)
        })
        .collect()
}

/// Renders run entries in TREC format: `topic_id Q0 pmid rank score tag`,
/// score with 6 decimal places, LF line endings.
pub fn render_run(entries: &[RunEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!(
            "{} Q0 {} {} {:.6} {}\n",
            e.topic_id, e.pmid, e.rank, e.score, e.tag
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunParseError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for RunParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed run line {}: {}", self.line, self.reason)
    }
}

impl core::error::Error for RunParseError {}

/// Parses TREC run text; the exact inverse of [`render_run`].
pub fn parse_run(text: &str) -> Result<Vec<RunEntry>, RunParseError> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fail = |reason: String| RunParseError { line: i + 1, reason };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(fail(format!("expected 6 fields, found {}", fields.len())));
        }
        if fields[1] != "Q0" {
            return Err(fail(format!("expected literal Q0, found {:?}", fields[1])));
        }
        let rank: u32 =
            fields[3].parse().map_err(|e| fail(format!("rank {:?}: {e}", fields[3])))?;
        let score: f64 =
            fields[4].parse().map_err(|e| fail(format!("score {:?}: {e}", fields[4])))?;
        entries.push(RunEntry {
            topic_id: fields[0].to_string(),
            rank,
            pmid: fields[2].to_string(),
            score,
            tag: fields[5].to_string(),
        });
    }
    Ok(entries)
}

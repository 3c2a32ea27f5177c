//! Inverted index over a corpus under one field schema, plus the line-based
//! text format it round-trips through.

use crate::analysis::AnalysisChain;
use crate::document::PubMedDocument;
use crate::schema::{FieldSchema, SchemaId};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Bumped whenever the on-disk text layout changes shape.
pub const FORMAT_VERSION: u32 = 1;

/// Upper bound on terms returned by [`Index::expand_prefix`].
pub const PREFIX_EXPANSION_CAP: usize = 128;

pub type DocId = u32;

/// One postings entry: (docid, term frequency).
pub type Posting = (DocId, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocEntry {
    pub pmid: String,
    /// Analyzed term count of the document's searchable text.
    pub len: u32,
}

/// Immutable inverted index. Terms map to docid-ascending postings; docids
/// are positions in the document table.
#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    schema: FieldSchema,
    chain: AnalysisChain,
    docs: Vec<DocEntry>,
    postings: BTreeMap<String, Vec<Posting>>,
    total_terms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildError {
    EmptyCorpus,
    DuplicatePmid { pmid: String },
    InvalidPmid { pmid: String },
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::EmptyCorpus => write!(f, "cannot index an empty corpus"),
            BuildError::DuplicatePmid { pmid } => write!(f, "duplicate pmid {pmid:?}"),
            BuildError::InvalidPmid { pmid } => {
                write!(f, "pmid {pmid:?} is not a non-empty decimal string")
            }
        }
    }
}

impl core::error::Error for BuildError {}

/// Builds an index by analyzing each document's searchable text under the
/// schema. Docids are assigned 0..N-1 in corpus order.
pub fn build_index<I>(corpus: I, schema: FieldSchema, chain: AnalysisChain) -> Result<Index, BuildError>
where
    I: IntoIterator<Item = PubMedDocument>,
{
    let analyzed = corpus.into_iter().map(|doc| {
        let terms = chain.analyze(&schema.searchable_text(&doc));
        (doc.pmid, terms)
    });
    Index::from_analyzed(analyzed, schema.clone(), chain.clone())
}

impl Index {
    /// Assembles an index from per-document analyzed terms, in corpus order.
    /// Callers may parallelize analysis as long as order is preserved.
    pub fn from_analyzed<I>(
        analyzed: I,
        schema: FieldSchema,
        chain: AnalysisChain,
    ) -> Result<Self, BuildError>
    where
        I: IntoIterator<Item = (String, Vec<String>)>,
    {
        let mut docs = Vec::new();
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        let mut seen: BTreeMap<String, ()> = BTreeMap::new();
        let mut total_terms: u64 = 0;
        for (pmid, terms) in analyzed {
            if pmid.is_empty() || !pmid.bytes().all(|b| b.is_ascii_digit()) {
                return Err(BuildError::InvalidPmid { pmid });
            }
            if seen.insert(pmid.clone(), ()).is_some() {
                return Err(BuildError::DuplicatePmid { pmid });
            }
            let docid = docs.len() as DocId;
            let mut tf: BTreeMap<&str, u32> = BTreeMap::new();
            for term in &terms {
                *tf.entry(term.as_str()).or_insert(0) += 1;
            }
            for (term, count) in tf {
                postings.entry(term.to_string()).or_default().push((docid, count));
            }
            total_terms += terms.len() as u64;
            docs.push(DocEntry { pmid, len: terms.len() as u32 });
        }
        if docs.is_empty() {
            return Err(BuildError::EmptyCorpus);
        }
        Ok(Index { schema, chain, docs, postings, total_terms })
    }

    pub fn schema(&self) -> &FieldSchema {
        &self.schema
    }

    pub fn chain(&self) -> &AnalysisChain {
        &self.chain
    }

    /// Document count N.
    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn total_terms(&self) -> u64 {
        self.total_terms
    }

    /// Mean analyzed document length.
    pub fn avgdl(&self) -> f64 {
        self.total_terms as f64 / self.docs.len() as f64
    }

    pub fn doc(&self, docid: DocId) -> Option<&DocEntry> {
        self.docs.get(docid as usize)
    }

    pub fn docs(&self) -> &[DocEntry] {
        &self.docs
    }

    /// Postings for an exact term; empty for unknown terms.
    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Document frequency; 0 for unknown terms.
    pub fn df(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    /// All dictionary terms starting with `prefix`, lexicographic order,
    /// capped at [`PREFIX_EXPANSION_CAP`]. An empty prefix expands to nothing.
    pub fn expand_prefix(&self, prefix: &str) -> Vec<&str> {
        if prefix.is_empty() {
            return Vec::new();
        }
        self.postings
            .range(prefix.to_string()..)
            .take_while(|(term, _)| term.starts_with(prefix))
            .take(PREFIX_EXPANSION_CAP)
            .map(|(term, _)| term.as_str())
            .collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &[Posting])> {
        self.postings.iter().map(|(t, p)| (t.as_str(), p.as_slice()))
    }
}

/// The three content files of an index directory, rendered as text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexFiles {
    pub meta: String,
    pub docs: String,
    pub postings: String,
}

/// Renders the index into its on-disk text form: sorted, line-oriented,
/// UTF-8 with LF endings, byte-identical across rebuilds from equal inputs.
pub fn render(index: &Index) -> IndexFiles {
    let mut meta = String::new();
    meta.push_str(&format!("version={}\n", FORMAT_VERSION));
    meta.push_str(&format!("schema={}\n", index.schema.id));
    meta.push_str(&format!("chain={}\n", index.chain.to_spec_line()));
    meta.push_str(&format!("n={}\n", index.docs.len()));
    meta.push_str(&format!("total_terms={}\n", index.total_terms));
    meta.push_str(&format!("avgdl={}\n", index.avgdl()));

    let mut docs = String::new();
    for (docid, entry) in index.docs.iter().enumerate() {
        docs.push_str(&format!("{docid}\t{}\t{}\n", entry.pmid, entry.len));
    }

    let mut postings = String::new();
    for (term, list) in &index.postings {
        let cells: Vec<String> = list.iter().map(|(d, tf)| format!("{d}:{tf}")).collect();
        postings.push_str(&format!("{term}\t{}\t{}\n", list.len(), cells.join(",")));
    }

    IndexFiles { meta, docs, postings }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// The meta file declares a layout this code does not read.
    VersionMismatch { found: u32, expected: u32 },
    /// Structural damage; `file` is "meta", "docs" or "postings".
    Malformed { file: &'static str, line: usize, reason: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::VersionMismatch { found, expected } => {
                write!(f, "index format version {found}, expected {expected}")
            }
            ParseError::Malformed { file, line, reason } => {
                write!(f, "malformed {file} file at line {line}: {reason}")
            }
        }
    }
}

impl core::error::Error for ParseError {}

fn malformed(file: &'static str, line: usize, reason: impl fmt::Display) -> ParseError {
    ParseError::Malformed { file, line, reason: reason.to_string() }
}

/// Parses the text form back into an index, checking every structural
/// invariant: df equals postings length, docids ascending and present in the
/// document table, term-count and avgdl consistency.
pub fn parse(files: &IndexFiles) -> Result<Index, ParseError> {
    let mut meta: BTreeMap<&str, &str> = BTreeMap::new();
    for (i, line) in files.meta.lines().enumerate() {
        let (key, value) =
            line.split_once('=').ok_or_else(|| malformed("meta", i + 1, "missing '='"))?;
        meta.insert(key, value);
    }
    let field = |key: &'static str| {
        meta.get(key).copied().ok_or_else(|| malformed("meta", 0, format!("missing key {key}")))
    };
    let version: u32 =
        field("version")?.parse().map_err(|e| malformed("meta", 1, format!("version: {e}")))?;
    if version != FORMAT_VERSION {
        return Err(ParseError::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }
    let schema_id: SchemaId =
        field("schema")?.parse().map_err(|e| malformed("meta", 0, e))?;
    let chain =
        AnalysisChain::from_spec_line(field("chain")?).map_err(|e| malformed("meta", 0, e))?;
    let n: usize = field("n")?.parse().map_err(|e| malformed("meta", 0, format!("n: {e}")))?;
    let total_terms: u64 =
        field("total_terms")?.parse().map_err(|e| malformed("meta", 0, format!("total_terms: {e}")))?;
    let avgdl: f64 =
        field("avgdl")?.parse().map_err(|e| malformed("meta", 0, format!("avgdl: {e}")))?;

    let mut docs = Vec::with_capacity(n);
    let mut length_sum: u64 = 0;
    for (i, line) in files.docs.lines().enumerate() {
        let mut cols = line.splitn(3, '\t');
        let (docid, pmid, len) = match (cols.next(), cols.next(), cols.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(malformed("docs", i + 1, "expected 3 tab-separated columns")),
        };
        let docid: usize =
            docid.parse().map_err(|e| malformed("docs", i + 1, format!("docid: {e}")))?;
        if docid != i {
            return Err(malformed("docs", i + 1, format!("docid {docid} out of sequence")));
        }
        let len: u32 = len.parse().map_err(|e| malformed("docs", i + 1, format!("len: {e}")))?;
        length_sum += u64::from(len);
        docs.push(DocEntry { pmid: pmid.to_string(), len });
    }
    if docs.len() != n {
        return Err(malformed("docs", docs.len(), format!("{} rows, meta says {n}", docs.len())));
    }
    if length_sum != total_terms {
        return Err(malformed("docs", 0, format!("length sum {length_sum} != total_terms {total_terms}")));
    }

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    for (i, line) in files.postings.lines().enumerate() {
        let mut cols = line.splitn(3, '\t');
        let (term, df, list) = match (cols.next(), cols.next(), cols.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(malformed("postings", i + 1, "expected 3 tab-separated columns")),
        };
        let df: usize = df.parse().map_err(|e| malformed("postings", i + 1, format!("df: {e}")))?;
        let mut entries: Vec<Posting> = Vec::with_capacity(df);
        for cell in list.split(',').filter(|c| !c.is_empty()) {
            let (d, tf) = cell
                .split_once(':')
                .ok_or_else(|| malformed("postings", i + 1, "expected docid:tf"))?;
            let d: DocId = d.parse().map_err(|e| malformed("postings", i + 1, format!("docid: {e}")))?;
            let tf: u32 = tf.parse().map_err(|e| malformed("postings", i + 1, format!("tf: {e}")))?;
            if (d as usize) >= docs.len() {
                return Err(malformed("postings", i + 1, format!("docid {d} not in document table")));
            }
            if let Some(&(prev, _)) = entries.last() {
                if d <= prev {
                    return Err(malformed("postings", i + 1, format!("docids not ascending at {d}")));
                }
            }
            entries.push((d, tf));
        }
        if entries.len() != df {
            return Err(malformed("postings", i + 1, format!("df {df} but {} entries", entries.len())));
        }
        if postings.insert(term.to_string(), entries).is_some() {
            return Err(malformed("postings", i + 1, format!("duplicate term {term:?}")));
        }
    }

    let index = Index {
        schema: FieldSchema::of(schema_id),
        chain,
        docs,
        postings,
        total_terms,
    };
    if index.avgdl() != avgdl {
        return Err(malformed("meta", 0, format!("avgdl {avgdl} != recomputed {}", index.avgdl())));
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn doc(pmid: &str, title: &str, abstract_text: &str) -> PubMedDocument {
        PubMedDocument {
            pmid: pmid.to_string(),
            title: title.to_string(),
            abstract_text: abstract_text.to_string(),
            ..Default::default()
        }
    }

    fn baseline() -> FieldSchema {
        FieldSchema::of(SchemaId::Baseline)
    }

    #[test]
    fn single_doc_baseline_indexes_pmid_as_text() {
        let idx = build_index(
            vec![doc("1", "aspirin", "")],
            baseline(),
            AnalysisChain::standard(),
        )
        .unwrap();
        assert_eq!(idx.n_docs(), 1);
        assert_eq!(idx.df("aspirin"), 1);
        assert_eq!(idx.df("1"), 1);
        assert_eq!(idx.postings("aspirin"), &[(0, 1)]);
    }

    #[test]
    fn mesh_fields_join_under_wider_schema() {
        let mut d = doc("1", "aspirin", "");
        d.mesh_headings = vec!["Dementia".to_string()];
        let idx = build_index(
            vec![d],
            FieldSchema::of(SchemaId::TwoMhlMta),
            AnalysisChain::standard(),
        )
        .unwrap();
        assert_eq!(idx.df("dementia"), 1);
    }

    #[test]
    fn shared_term_accumulates_df_and_postings() {
        let idx = build_index(
            vec![doc("1", "trial one", ""), doc("2", "trial two", "")],
            baseline(),
            AnalysisChain::standard(),
        )
        .unwrap();
        assert_eq!(idx.df("trial"), 2);
        assert_eq!(idx.postings("trial"), &[(0, 1), (1, 1)]);
    }

    #[test]
    fn unknown_terms_are_empty() {
        let idx =
            build_index(vec![doc("1", "x", "")], baseline(), AnalysisChain::standard()).unwrap();
        assert_eq!(idx.postings("zzz"), &[]);
        assert_eq!(idx.df("zzz"), 0);
    }

    #[test]
    fn duplicate_pmid_is_named() {
        let err = build_index(
            vec![doc("7", "a", ""), doc("7", "b", "")],
            baseline(),
            AnalysisChain::standard(),
        )
        .unwrap_err();
        assert_eq!(err, BuildError::DuplicatePmid { pmid: "7".to_string() });
    }

    #[test]
    fn empty_corpus_is_rejected() {
        let err =
            build_index(Vec::new(), baseline(), AnalysisChain::standard()).unwrap_err();
        assert_eq!(err, BuildError::EmptyCorpus);
    }

    #[test]
    fn bad_pmid_is_rejected() {
        let err = build_index(
            vec![doc("12a", "x", "")],
            baseline(),
            AnalysisChain::standard(),
        )
        .unwrap_err();
        assert_eq!(err, BuildError::InvalidPmid { pmid: "12a".to_string() });
    }

    #[test]
    fn expand_prefix_is_sorted_and_capped() {
        let mut d = doc("1", "", "");
        let mut words = Vec::new();
        for i in 0..200 {
            words.push(format!("zw{i:03}"));
        }
        d.title = words.join(" ");
        let idx = build_index(vec![d], baseline(), AnalysisChain::standard()).unwrap();
        assert_eq!(idx.expand_prefix("dement"), Vec::<&str>::new());
        let hits = idx.expand_prefix("zw");
        assert_eq!(hits.len(), PREFIX_EXPANSION_CAP);
        assert!(hits.windows(2).all(|w| w[0] < w[1]));
        assert!(hits.iter().all(|t| t.starts_with("zw")));
        // Word parts put the bare prefix itself in the dictionary.
        assert_eq!(hits[0], "zw");
        assert_eq!(hits[1], "zw000");
        assert_eq!(idx.expand_prefix(""), Vec::<&str>::new());
    }

    #[test]
    fn render_parse_round_trip_is_structural_and_byte_identical() {
        let mut d1 = doc("10", "Dementia drugs and trials", "A drug trial of donepezil.");
        d1.mesh_headings = vec!["Dementia".to_string(), "therapy".to_string()];
        d1.authors = vec!["Smith J".to_string()];
        d1.year = Some(2004);
        let d2 = doc("9", "Placebo comparisons", "Dementia screening.");
        let idx = build_index(
            vec![d1, d2],
            FieldSchema::of(SchemaId::TwoMhlMta),
            AnalysisChain::standard(),
        )
        .unwrap();
        let files = render(&idx);
        let back = parse(&files).unwrap();
        assert_eq!(back, idx);
        assert_eq!(render(&back), files);
    }

    #[test]
    fn parse_rejects_version_and_tampering() {
        let idx =
            build_index(vec![doc("1", "x", "")], baseline(), AnalysisChain::standard()).unwrap();
        let files = render(&idx);

        let mut wrong_version = files.clone();
        wrong_version.meta = wrong_version.meta.replace("version=1", "version=99");
        assert_eq!(
            parse(&wrong_version).unwrap_err(),
            ParseError::VersionMismatch { found: 99, expected: FORMAT_VERSION }
        );

        let mut bad_df = files.clone();
        bad_df.postings = bad_df.postings.replace("x\t1\t", "x\t2\t");
        assert!(matches!(parse(&bad_df).unwrap_err(), ParseError::Malformed { file: "postings", .. }));

        let mut bad_sum = files;
        bad_sum.meta = bad_sum.meta.replace("total_terms=2", "total_terms=3");
        assert!(matches!(parse(&bad_sum).unwrap_err(), ParseError::Malformed { .. }));
    }

    #[test]
    fn doc_lengths_count_analyzed_terms() {
        // "anti-viral drugs" analyzes to 4 terms (original kept plus parts).
        let idx = build_index(
            vec![doc("1", "anti-viral drugs", "")],
            baseline(),
            AnalysisChain::standard(),
        )
        .unwrap();
        // Title terms + pmid token "1".
        assert_eq!(idx.doc(0).unwrap().len, 5);
        assert_eq!(idx.total_terms(), 5);
        assert_eq!(idx.avgdl(), 5.0);
        assert_eq!(idx.schema().id, SchemaId::Baseline);
    }

    #[test]
    fn fields_absent_from_schema_do_not_leak() {
        let mut d = doc("1", "title", "");
        d.mesh_headings = vec!["Dementia".to_string()];
        let idx = build_index(vec![d], baseline(), AnalysisChain::standard()).unwrap();
        assert_eq!(idx.df("dementia"), 0);
    }
}

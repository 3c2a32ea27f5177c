//! Streaming PubMed/MEDLINE XML ingestion. Each record becomes one
//! [`PubMedDocument`]; missing elements map to empty fields, a missing PMID
//! rejects the record.

use flate2::read::GzDecoder;
use quick_xml::events::Event;
use quick_xml::Reader;
use rayon::prelude::*;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use tarlab_core::PubMedDocument;
use walkdir::WalkDir;

#[derive(Debug)]
pub enum IngestError {
    Xml { offset: u64, message: String },
    MissingPmid { record: usize },
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Xml { offset, message } => {
                write!(f, "malformed xml at byte {offset}: {message}")
            }
            IngestError::MissingPmid { record } => write!(f, "record {record} has no PMID"),
            IngestError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for IngestError {}

/// Elements whose text content feeds a document field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Capture {
    Pmid,
    ArticleTitle,
    AbstractText,
    LastName,
    ForeName,
    Initials,
    CollectiveName,
    JournalTitle,
    Year,
    MedlineDate,
    DescriptorName,
    QualifierName,
    MedlineTa,
}

#[derive(Default)]
struct AuthorParts {
    last: String,
    fore: String,
    initials: String,
    collective: String,
}

impl AuthorParts {
    fn render(&self) -> String {
        if !self.last.is_empty() {
            let given = if !self.fore.is_empty() { &self.fore } else { &self.initials };
            if given.is_empty() {
                self.last.clone()
            } else {
                format!("{} {}", self.last, given)
            }
        } else {
            self.collective.clone()
        }
    }
}

#[derive(Default)]
struct RecordState {
    pmid: Option<String>,
    title: String,
    abstract_segments: Vec<String>,
    authors: Vec<String>,
    author: AuthorParts,
    journal_title: String,
    year: Option<u16>,
    medline_date: String,
    mesh_headings: Vec<String>,
    medline_ta: String,
}

impl RecordState {
    fn finish(self, record: usize) -> Result<PubMedDocument, IngestError> {
        let pmid = self.pmid.ok_or(IngestError::MissingPmid { record })?;
        let year = self.year.or_else(|| first_four_digit_run(&self.medline_date));
        Ok(PubMedDocument {
            pmid,
            title: self.title,
            abstract_text: self.abstract_segments.join(" "),
            authors: self.authors,
            journal_title: self.journal_title,
            year,
            mesh_headings: self.mesh_headings,
            medline_ta: self.medline_ta,
        })
    }
}

/// First run of four or more decimal digits, e.g. "2000 Jan-Feb" → 2000.
fn first_four_digit_run(s: &str) -> Option<u16> {
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i - start >= 4 {
                return s[start..start + 4].parse().ok();
            }
        } else {
            i += 1;
        }
    }
    None
}

/// Parses a PubmedArticleSet (or a bare PubmedArticle) into documents in
/// stream order. Constant memory per record.
pub fn parse_pubmed_xml<R: BufRead>(input: R) -> Result<Vec<PubMedDocument>, IngestError> {
    let mut reader = Reader::from_reader(input);
    let xml_err = |reader: &Reader<R>, message: String| IngestError::Xml {
        offset: reader.buffer_position(),
        message,
    };
    let mut buf = Vec::new();
    let mut stack: Vec<Vec<u8>> = Vec::new();
    let mut docs = Vec::new();
    let mut state: Option<RecordState> = None;
    let mut records = 0usize;
    // Active capture plus the stack depth of its element, so nested inline
    // markup inside a captured element keeps accumulating text.
    let mut capture: Option<(Capture, usize, String)> = None;
    loop {
        let event = match reader.read_event_into(&mut buf) {
            Ok(event) => event,
            Err(e) => return Err(xml_err(&reader, e.to_string())),
        };
        match event {
            Event::Start(ref e) => {
                let name = e.name().as_ref().to_vec();
                let parent = stack.last().map(Vec::as_slice);
                if name == b"PubmedArticle" {
                    records += 1;
                    state = Some(RecordState::default());
                }
                if let Some(st) = state.as_mut() {
                    if name == b"Author" {
                        st.author = AuthorParts::default();
                    }
                    if let Some(kind) = capture_kind(&name, parent, st) {
                        capture = Some((kind, stack.len(), String::new()));
                    }
                }
                stack.push(name);
            }
            Event::Empty(_) => {}
            Event::Text(t) => {
                if let Some((_, _, text)) = capture.as_mut() {
                    match t.unescape() {
                        Ok(s) => text.push_str(&s),
                        Err(e) => return Err(xml_err(&reader, e.to_string())),
                    }
                }
            }
            Event::CData(t) => {
                if let Some((_, _, text)) = capture.as_mut() {
                    text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::End(ref e) => {
                let name = e.name().as_ref().to_vec();
                stack.pop();
                if let Some((kind, depth, text)) = capture.take() {
                    if depth == stack.len() {
                        if let Some(st) = state.as_mut() {
                            commit(st, kind, text.trim());
                        }
                    } else {
                        // Inline markup closed inside the captured element.
                        capture = Some((kind, depth, text));
                    }
                }
                if let Some(st) = state.as_mut() {
                    if name == b"Author" {
                        let rendered = st.author.render();
                        if !rendered.is_empty() {
                            st.authors.push(rendered);
                        }
                    }
                }
                if name == b"PubmedArticle" {
                    if let Some(st) = state.take() {
                        docs.push(st.finish(records)?);
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if let Some(st) = state.take() {
        // Bare PubmedArticle root closed by EOF handling above only when the
        // end tag was seen; a leftover state means truncated input.
        let _ = st;
        return Err(xml_err(&reader, "unclosed PubmedArticle".to_string()));
    }
    Ok(docs)
}

fn capture_kind(name: &[u8], parent: Option<&[u8]>, st: &RecordState) -> Option<Capture> {
    match name {
        b"PMID" if parent == Some(b"MedlineCitation") && st.pmid.is_none() => Some(Capture::Pmid),
        b"ArticleTitle" => Some(Capture::ArticleTitle),
        b"AbstractText" if parent == Some(b"Abstract") => Some(Capture::AbstractText),
        b"LastName" if parent == Some(b"Author") => Some(Capture::LastName),
        b"ForeName" if parent == Some(b"Author") => Some(Capture::ForeName),
        b"Initials" if parent == Some(b"Author") => Some(Capture::Initials),
        b"CollectiveName" if parent == Some(b"Author") => Some(Capture::CollectiveName),
        b"Title" if parent == Some(b"Journal") => Some(Capture::JournalTitle),
        b"Year" if parent == Some(b"PubDate") => Some(Capture::Year),
        b"MedlineDate" if parent == Some(b"PubDate") => Some(Capture::MedlineDate),
        b"DescriptorName" if parent == Some(b"MeshHeading") => Some(Capture::DescriptorName),
        b"QualifierName" if parent == Some(b"MeshHeading") => Some(Capture::QualifierName),
        b"MedlineTA" if parent == Some(b"MedlineJournalInfo") => Some(Capture::MedlineTa),
        _ => None,
    }
}

fn commit(st: &mut RecordState, kind: Capture, text: &str) {
    match kind {
        Capture::Pmid => st.pmid = Some(text.to_string()),
        Capture::ArticleTitle => st.title = text.to_string(),
        Capture::AbstractText => {
            if !text.is_empty() {
                st.abstract_segments.push(text.to_string());
            }
        }
        Capture::LastName => st.author.last = text.to_string(),
        Capture::ForeName => st.author.fore = text.to_string(),
        Capture::Initials => st.author.initials = text.to_string(),
        Capture::CollectiveName => st.author.collective = text.to_string(),
        Capture::JournalTitle => st.journal_title = text.to_string(),
        Capture::Year => st.year = st.year.or_else(|| text.parse().ok()),
        Capture::MedlineDate => st.medline_date = text.to_string(),
        Capture::DescriptorName | Capture::QualifierName => {
            if !text.is_empty() {
                st.mesh_headings.push(text.to_string());
            }
        }
        Capture::MedlineTa => st.medline_ta = text.to_string(),
    }
}

/// Recursively collects `.xml` and `.xml.gz` files in sorted order and
/// parses them, files in parallel, output in path order.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<PubMedDocument>, IngestError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| dir.to_path_buf());
            let source = e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("walk error"));
            IngestError::Io { path, source }
        })?;
        if entry.file_type().is_file() && is_corpus_file(entry.path()) {
            files.push(entry.into_path());
        }
    }
    let per_file: Vec<Vec<PubMedDocument>> = files
        .par_iter()
        .map(|path| parse_corpus_file(path))
        .collect::<Result<_, _>>()?;
    Ok(per_file.into_iter().flatten().collect())
}

fn is_corpus_file(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.ends_with(".xml") || name.ends_with(".xml.gz")
}

pub fn parse_corpus_file(path: &Path) -> Result<Vec<PubMedDocument>, IngestError> {
    let file = File::open(path)
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    if name.ends_with(".gz") {
        parse_pubmed_xml(BufReader::new(GzDecoder::new(file)))
    } else {
        parse_pubmed_xml(BufReader::new(file))
    }
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders documents as a PubmedArticleSet that [`parse_pubmed_xml`] maps
/// back to the same values. Author strings split on the first space into
/// LastName and ForeName; single-token authors become collective names.
pub fn render_pubmed_xml(docs: &[PubMedDocument]) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<PubmedArticleSet>\n");
    for d in docs {
        out.push_str("<PubmedArticle>\n<MedlineCitation>\n");
        out.push_str(&format!("<PMID>{}</PMID>\n", escape_xml(&d.pmid)));
        out.push_str("<Article>\n<Journal>\n");
        if let Some(year) = d.year {
            out.push_str(&format!(
                "<JournalIssue><PubDate><Year>{year}</Year></PubDate></JournalIssue>\n"
            ));
        }
        if !d.journal_title.is_empty() {
            out.push_str(&format!("<Title>{}</Title>\n", escape_xml(&d.journal_title)));
        }
        out.push_str("</Journal>\n");
        out.push_str(&format!("<ArticleTitle>{}</ArticleTitle>\n", escape_xml(&d.title)));
        if !d.abstract_text.is_empty() {
            out.push_str(&format!(
                "<Abstract><AbstractText>{}</AbstractText></Abstract>\n",
                escape_xml(&d.abstract_text)
            ));
        }
        if !d.authors.is_empty() {
            out.push_str("<AuthorList>\n");
            for author in &d.authors {
                match author.split_once(' ') {
                    Some((last, given)) => out.push_str(&format!(
                        "<Author><LastName>{}</LastName><ForeName>{}</ForeName></Author>\n",
                        escape_xml(last),
                        escape_xml(given)
                    )),
                    None => out.push_str(&format!(
                        "<Author><CollectiveName>{}</CollectiveName></Author>\n",
                        escape_xml(author)
                    )),
                }
            }
            out.push_str("</AuthorList>\n");
        }
        out.push_str("</Article>\n");
        if !d.medline_ta.is_empty() {
            out.push_str(&format!(
                "<MedlineJournalInfo><MedlineTA>{}</MedlineTA></MedlineJournalInfo>\n",
                escape_xml(&d.medline_ta)
            ));
        }
        if !d.mesh_headings.is_empty() {
            out.push_str("<MeshHeadingList>\n");
            for heading in &d.mesh_headings {
                out.push_str(&format!(
                    "<MeshHeading><DescriptorName>{}</DescriptorName></MeshHeading>\n",
                    escape_xml(heading)
                ));
            }
            out.push_str("</MeshHeadingList>\n");
        }
        out.push_str("</MedlineCitation>\n</PubmedArticle>\n");
    }
    out.push_str("</PubmedArticleSet>\n");
    out
}

fn escape_cell(s: &str) -> String {
    // Only ASCII bytes are escaped, so multi-byte UTF-8 passes through.
    let mut bytes = Vec::with_capacity(s.len());
    for &b in s.as_bytes() {
        match b {
            b'%' | b'\t' | b'\n' | b'\r' | b'|' => {
                bytes.extend_from_slice(format!("%{b:02X}").as_bytes())
            }
            _ => bytes.push(b),
        }
    }
    String::from_utf8(bytes).expect("escaping preserves utf-8")
}

fn unescape_cell(s: &str) -> Option<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes.get(i + 1..i + 3)?;
            let hi = (hex[0] as char).to_digit(16)?;
            let lo = (hex[1] as char).to_digit(16)?;
            out.push((hi * 16 + lo) as u8);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

/// One line per document: eight tab-separated cells, list entries joined
/// with '|', every cell percent-escaped. [`parse_doc_table`] inverts it
/// exactly.
pub fn render_doc_table(docs: &[PubMedDocument]) -> String {
    let mut out = String::new();
    for d in docs {
        let authors: Vec<String> = d.authors.iter().map(|a| escape_cell(a)).collect();
        let mesh: Vec<String> = d.mesh_headings.iter().map(|m| escape_cell(m)).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            escape_cell(&d.pmid),
            escape_cell(&d.title),
            escape_cell(&d.abstract_text),
            authors.join("|"),
            escape_cell(&d.journal_title),
            d.year.map(|y| y.to_string()).unwrap_or_default(),
            mesh.join("|"),
            escape_cell(&d.medline_ta),
        ));
    }
    out
}

#[derive(Debug)]
pub struct DocTableError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for DocTableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "doc table line {}: {}", self.line, self.reason)
    }
}

impl std::error::Error for DocTableError {}

pub fn parse_doc_table(text: &str) -> Result<Vec<PubMedDocument>, DocTableError> {
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |reason: &str| DocTableError { line: i + 1, reason: reason.to_string() };
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 8 {
            return Err(err(&format!("expected 8 cells, found {}", cells.len())));
        }
        let cell = |idx: usize| unescape_cell(cells[idx]).ok_or_else(|| err("bad escape"));
        let list = |idx: usize| -> Result<Vec<String>, DocTableError> {
            if cells[idx].is_empty() {
                return Ok(Vec::new());
            }
            cells[idx]
                .split('|')
                .map(|c| unescape_cell(c).ok_or_else(|| err("bad escape")))
                .collect()
        };
        let year = if cells[5].is_empty() {
            None
        } else {
            Some(cells[5].parse::<u16>().map_err(|_| err("bad year"))?)
        };
        docs.push(PubMedDocument {
            pmid: cell(0)?,
            title: cell(1)?,
            abstract_text: cell(2)?,
            authors: list(3)?,
            journal_title: cell(4)?,
            year,
            mesh_headings: list(6)?,
            medline_ta: cell(7)?,
        });
    }
    Ok(docs)
}

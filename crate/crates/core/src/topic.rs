//! Topic files and the five query variants, including the Boolean-cleaning
//! transformation that repairs Ovid syntax for ranked retrieval.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// One systematic-review topic: id, review title, raw Boolean query lines,
/// and optionally the PMID collection the topic was drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topic {
    pub topic_id: String,
    pub title: String,
    pub boolean_query: Vec<String>,
    pub pids: Vec<String>,
}

/// The five ways a topic becomes a ranked-retrieval query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryVariant {
    Title,
    Query,
    TitleQuery,
    Query2,
    TitleQuery2,
}

impl QueryVariant {
    pub const ALL: [QueryVariant; 5] = [
        QueryVariant::Title,
        QueryVariant::Query,
        QueryVariant::TitleQuery,
        QueryVariant::Query2,
        QueryVariant::TitleQuery2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryVariant::Title => "title",
            QueryVariant::Query => "query",
            QueryVariant::TitleQuery => "title&query",
            QueryVariant::Query2 => "query2",
            QueryVariant::TitleQuery2 => "title&query2",
        }
    }
}

impl fmt::Display for QueryVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownVariantError {
    pub name: String,
}

impl fmt::Display for UnknownVariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown query variant {:?} (expected title, query, title&query, query2 or title&query2)",
            self.name
        )
    }
}

impl core::error::Error for UnknownVariantError {}

impl core::str::FromStr for QueryVariant {
    type Err = UnknownVariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QueryVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| UnknownVariantError { name: String::from(s) })
    }
}

/// A materialized query: raw term strings, pre-analysis. Terms may carry
/// '*' wildcards; they never contain Boolean operators or line numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub variant: QueryVariant,
    pub terms: Vec<String>,
}

/// Section missing from a topic file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingSectionError {
    pub section: &'static str,
}

impl fmt::Display for MissingSectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "topic file is missing its {} section", self.section)
    }
}

impl core::error::Error for MissingSectionError {}

/// Parses one topic file: a `Topic:` line, a `Title:` line, a `Query:`
/// header with the query lines beneath it, and an optional `Pids:` section.
/// Lines are trimmed; blank lines are skipped.
pub fn parse_topic_file(text: &str) -> Result<Topic, MissingSectionError> {
    enum Section {
        None,
        Query,
        Pids,
    }
    let mut topic_id: Option<String> = None;
    let mut title: Option<String> = None;
    let mut query_seen = false;
    let mut boolean_query = Vec::new();
    let mut pids = Vec::new();
    let mut section = Section::None;
    for raw in text.lines() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("Topic:") {
            topic_id = Some(rest.trim().to_string());
            section = Section::None;
        } else if let Some(rest) = line.strip_prefix("Title:") {
            title = Some(rest.trim().to_string());
            section = Section::None;
        } else if let Some(rest) = line.strip_prefix("Query:") {
            query_seen = true;
            section = Section::Query;
            if !rest.trim().is_empty() {
                boolean_query.push(rest.trim().to_string());
            }
        } else if let Some(rest) = line.strip_prefix("Pids:") {
            section = Section::Pids;
            if !rest.trim().is_empty() {
                pids.push(rest.trim().to_string());
            }
        } else if !line.is_empty() {
            match section {
                Section::Query => boolean_query.push(line.to_string()),
                Section::Pids => pids.push(line.to_string()),
                Section::None => {}
            }
        }
    }
    let missing = |section| Err(MissingSectionError { section });
    match topic_id {
        Some(id) if !id.is_empty() => {
            let title = match title {
                Some(t) if !t.is_empty() => t,
                _ => return missing("Title"),
            };
            if !query_seen || boolean_query.is_empty() {
                return missing("Query");
            }
            Ok(Topic { topic_id: id, title, boolean_query, pids })
        }
        _ => missing("Topic"),
    }
}

fn is_operator(token: &str) -> bool {
    token.eq_ignore_ascii_case("and")
        || token.eq_ignore_ascii_case("or")
        || token.eq_ignore_ascii_case("not")
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Digit sequence or range `a-b`.
fn is_line_item(s: &str) -> bool {
    is_digits(s) || s.split_once('-').is_some_and(|(a, b)| is_digits(a) && is_digits(b))
}

/// Comma-separated list of digit sequences and ranges, e.g. "3,4" or "1-5".
fn is_line_list(s: &str) -> bool {
    !s.is_empty() && s.split(',').all(is_line_item)
}

/// True for tokens that only reference other query lines: operators, line
/// numbers, ranges, and `op/list` forms like "or/1-5" or "and/3,4".
fn is_reference_token(token: &str) -> bool {
    if is_operator(token) || is_line_list(token) {
        return true;
    }
    token
        .split_once('/')
        .is_some_and(|(op, list)| is_operator(op) && is_line_list(list))
}

/// Strips a leading `N.` or `#N` line-number prefix.
fn strip_line_number(line: &str) -> &str {
    let line = line.trim_start();
    if let Some(rest) = line.strip_prefix('#') {
        let after = rest.trim_start_matches(|c: char| c.is_ascii_digit());
        if after.len() < rest.len() {
            return after.trim_start();
        }
        return line;
    }
    let digits_end = line.len() - line.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits_end > 0 {
        if let Some(rest) = line[digits_end..].strip_prefix('.') {
            return rest.trim_start();
        }
    }
    line
}

/// The `query` variant: flattens Boolean query lines to a bag of raw terms.
/// Line numbers and pure line-reference lines are dropped, text splits on
/// whitespace and parentheses, Boolean operators are removed, and everything
/// else is kept verbatim (Ovid syntax residue included).
pub fn flatten_query<S: AsRef<str>>(lines: &[S]) -> Vec<String> {
    let mut terms = Vec::new();
    for line in lines {
        let body = strip_line_number(line.as_ref());
        let tokens: Vec<&str> = body
            .split(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() || tokens.iter().all(|t| is_reference_token(t)) {
            continue;
        }
        for token in tokens {
            if !is_operator(token) {
                terms.push(token.to_string());
            }
        }
    }
    terms
}

/// Title/Abstract qualifier suffixes stripped by the query2 cleaning.
const QUALIFIER_SUFFIXES: &[&str] =
    &[".ti,ab.", ".ti.", ".ab.", ".mp.", ".sh.", ".pt.", ".tw."];
const QUALIFIER_TAGS: &[&str] = &["[tiab]", "[ti]", "[ab]", "[mh]", "[pt]", "[tw]"];

fn strip_qualifier(token: &str) -> &str {
    for suffix in QUALIFIER_SUFFIXES.iter().chain(QUALIFIER_TAGS) {
        if token.len() >= suffix.len() {
            let (head, tail) = token.split_at(token.len() - suffix.len());
            if tail.eq_ignore_ascii_case(suffix) {
                return head;
            }
        }
    }
    token
}

/// The `query2` variant: [`flatten_query`] followed by the three repairs —
/// explosion removal (drop "exp", strip one trailing '/'), qualifier
/// stripping, and rewriting the wildcard characters '?', '#', '$' to '*'.
/// Tokens emptied by the repairs are dropped.
pub fn clean_query2<S: AsRef<str>>(lines: &[S]) -> Vec<String> {
    let mut terms = Vec::new();
    for token in flatten_query(lines) {
        if token.eq_ignore_ascii_case("exp") {
            continue;
        }
        let token = token.strip_suffix('/').unwrap_or(&token);
        let token = strip_qualifier(token);
        let cleaned: String = token
            .chars()
            .map(|c| if matches!(c, '?' | '#' | '$') { '*' } else { c })
            .collect();
        if !cleaned.is_empty() {
            terms.push(cleaned);
        }
    }
    terms
}

/// Materializes one of the five query variants from a topic.
pub fn make_query(topic: &Topic, variant: QueryVariant) -> Query {
    let title_terms =
        || topic.title.split_whitespace().map(str::to_string).collect::<Vec<_>>();
    let terms = match variant {
        QueryVariant::Title => title_terms(),
        QueryVariant::Query => flatten_query(&topic.boolean_query),
        QueryVariant::TitleQuery => {
            let mut t = title_terms();
            t.extend(flatten_query(&topic.boolean_query));
            t
        }
        QueryVariant::Query2 => clean_query2(&topic.boolean_query),
        QueryVariant::TitleQuery2 => {
            let mut t = title_terms();
            t.extend(clean_query2(&topic.boolean_query));
            t
        }
    };
    Query { variant, terms }
}

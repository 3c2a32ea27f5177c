//! Deterministic token pipeline applied identically at index and query time:
//! standard tokenization followed by pattern replacement, word delimiting,
//! lowercasing, stopword removal, and Porter stemming.

pub mod porter;

pub use porter::stem as porter_stem;

use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// The classic 33-term English stopword list.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "if", "in", "into", "is",
    "it", "no", "not", "of", "on", "or", "such", "that", "the", "their", "then", "there",
    "these", "they", "this", "to", "was", "will", "with",
];

/// Characters kept inside a token when strictly between alphanumerics.
const JOINERS: [char; 4] = ['.', '-', '_', '\''];

/// Token filter stages, applied in chain order after tokenization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    PatternReplace,
    WordDelimit,
    Lowercase,
    Stop,
    Stem,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::PatternReplace => "pattern_replace",
            Stage::WordDelimit => "word_delimit",
            Stage::Lowercase => "lowercase",
            Stage::Stop => "stop",
            Stage::Stem => "stem",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "pattern_replace" => Stage::PatternReplace,
            "word_delimit" => Stage::WordDelimit,
            "lowercase" => Stage::Lowercase,
            "stop" => Stage::Stop,
            "stem" => Stage::Stem,
            _ => return None,
        })
    }
}

/// In-token rewrite applied by the pattern-replacement stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternRule {
    /// Deletes a trailing possessive ('s or 'S), then every remaining
    /// non-alphanumeric character that is not a '.', '-' or '_' strictly
    /// between alphanumerics.
    Possessive,
    /// Replaces every occurrence of `find` with `replace`.
    Literal { find: String, replace: String },
}

impl PatternRule {
    pub fn apply(&self, token: &str) -> String {
        match self {
            PatternRule::Possessive => {
                let trimmed = token
                    .strip_suffix("'s")
                    .or_else(|| token.strip_suffix("'S"))
                    .unwrap_or(token);
                let chars: Vec<char> = trimmed.chars().collect();
                let mut out = String::with_capacity(trimmed.len());
                for (i, &c) in chars.iter().enumerate() {
                    let keep = c.is_alphanumeric()
                        || (matches!(c, '.' | '-' | '_')
                            && i > 0
                            && i + 1 < chars.len()
                            && chars[i - 1].is_alphanumeric()
                            && chars[i + 1].is_alphanumeric());
                    if keep {
                        out.push(c);
                    }
                }
                out
            }
            PatternRule::Literal { find, replace } => {
                if find.is_empty() {
                    token.to_owned()
                } else {
                    token.replace(find.as_str(), replace)
                }
            }
        }
    }
}

/// Flags of the word-delimiter stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordDelimiterFlags {
    pub generate_word_parts: bool,
    pub preserve_original: bool,
}

impl Default for WordDelimiterFlags {
    fn default() -> Self {
        WordDelimiterFlags { generate_word_parts: true, preserve_original: true }
    }
}

/// Splits text into maximal runs of alphanumerics; '.', '-', '_' and '''
/// are retained when strictly between alphanumerics, everything else is a
/// separator.
pub fn tokenize(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let is_alnum = |i: usize| i < chars.len() && chars[i].1.is_alphanumeric();
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &(off, c)) in chars.iter().enumerate() {
        let in_token = c.is_alphanumeric()
            || (JOINERS.contains(&c) && i > 0 && is_alnum(i - 1) && is_alnum(i + 1));
        if in_token {
            start.get_or_insert(off);
        } else if let Some(s) = start.take() {
            tokens.push(&text[s..off]);
        }
    }
    if let Some(s) = start {
        tokens.push(&text[s..]);
    }
    tokens
}

/// Splits a token on intra-word joiners, letter↔digit transitions and
/// lowercase→uppercase transitions. With `generate_word_parts` the parts are
/// emitted; with `preserve_original` the unmodified token is emitted first
/// whenever any split occurred. A token with no split points yields itself.
pub fn word_delimit(token: &str, flags: WordDelimiterFlags) -> Vec<&str> {
    let chars: Vec<(usize, char)> = token.char_indices().collect();
    let mut parts: Vec<&str> = Vec::new();
    let mut split = false;
    let mut start: Option<usize> = None;
    for i in 0..chars.len() {
        let (off, c) = chars[i];
        if JOINERS.contains(&c) {
            split = true;
            if let Some(s) = start.take() {
                parts.push(&token[s..off]);
            }
            continue;
        }
        if start.is_some() {
            let prev = chars[i - 1].1;
            let boundary = (prev.is_alphabetic() && c.is_numeric())
                || (prev.is_numeric() && c.is_alphabetic())
                || (prev.is_lowercase() && c.is_uppercase());
            if boundary {
                split = true;
                if let Some(s) = start.take() {
                    parts.push(&token[s..off]);
                }
            }
        }
        start.get_or_insert(off);
    }
    if let Some(s) = start {
        parts.push(&token[s..]);
    }
    if !split {
        return parts;
    }
    let mut out = Vec::with_capacity(parts.len() + 1);
    if flags.preserve_original {
        out.push(token);
    }
    if flags.generate_word_parts {
        out.extend(parts);
    }
    out
}

/// Analysis configuration: stage order plus the settings each stage reads.
/// Serialized with every index so query-time analysis always matches
/// index-time analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisChain {
    stages: Vec<Stage>,
    stopwords: BTreeSet<String>,
    pattern_rule: PatternRule,
    word_delimiter_flags: WordDelimiterFlags,
}

impl Default for AnalysisChain {
    fn default() -> Self {
        Self::standard()
    }
}

impl AnalysisChain {
    /// The full chain: pattern replacement, word delimiting, lowercasing,
    /// stopping, stemming, with default settings for each.
    pub fn standard() -> Self {
        AnalysisChain {
            stages: alloc::vec![
                Stage::PatternReplace,
                Stage::WordDelimit,
                Stage::Lowercase,
                Stage::Stop,
                Stage::Stem,
            ],
            stopwords: DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect(),
            pattern_rule: PatternRule::Possessive,
            word_delimiter_flags: WordDelimiterFlags::default(),
        }
    }

    pub fn with_stages(mut self, stages: Vec<Stage>) -> Self {
        self.stages = stages;
        self
    }

    /// Stopwords are stored lowercase regardless of input case.
    pub fn with_stopwords<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, words: I) -> Self {
        self.stopwords = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        self
    }

    pub fn with_pattern_rule(mut self, rule: PatternRule) -> Self {
        self.pattern_rule = rule;
        self
    }

    pub fn with_word_delimiter_flags(mut self, flags: WordDelimiterFlags) -> Self {
        self.word_delimiter_flags = flags;
        self
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn is_stopword(&self, term: &str) -> bool {
        self.stopwords.contains(term)
    }

    /// Runs the whole pipeline; output preserves positional order and keeps
    /// duplicates.
    pub fn analyze(&self, text: &str) -> Vec<String> {
        let mut terms: Vec<String> = tokenize(text).iter().map(|t| (*t).to_owned()).collect();
        for stage in &self.stages {
            terms = match stage {
                Stage::PatternReplace => terms
                    .iter()
                    .map(|t| self.pattern_rule.apply(t))
                    .filter(|t| !t.is_empty())
                    .collect(),
                Stage::WordDelimit => terms
                    .iter()
                    .flat_map(|t| {
                        word_delimit(t, self.word_delimiter_flags)
                            .into_iter()
                            .map(|p| p.to_owned())
                            .collect::<Vec<_>>()
                    })
                    .collect(),
                Stage::Lowercase => terms.iter().map(|t| t.to_lowercase()).collect(),
                Stage::Stop => terms.into_iter().filter(|t| !self.stopwords.contains(t)).collect(),
                Stage::Stem => terms.iter().map(|t| porter::stem(t).into_owned()).collect(),
            };
        }
        // Bare "s" stems to the empty string under the guardless algorithm.
        terms.retain(|t| !t.is_empty());
        terms
    }

    /// Renders the chain as the single-line form stored in index metadata.
    pub fn to_spec_line(&self) -> String {
        let stages: Vec<&str> = self.stages.iter().map(|s| s.name()).collect();
        let stopwords: Vec<String> = self.stopwords.iter().map(|w| encode(w)).collect();
        let pattern = match &self.pattern_rule {
            PatternRule::Possessive => "possessive".to_string(),
            PatternRule::Literal { find, replace } => {
                let mut s = String::from("literal:");
                s.push_str(&encode(find));
                s.push(':');
                s.push_str(&encode(replace));
                s
            }
        };
        let mut line = String::new();
        line.push_str("stages=");
        line.push_str(&stages.join(","));
        line.push_str("|parts=");
        line.push_str(if self.word_delimiter_flags.generate_word_parts { "true" } else { "false" });
        line.push_str("|original=");
        line.push_str(if self.word_delimiter_flags.preserve_original { "true" } else { "false" });
        line.push_str("|pattern=");
        line.push_str(&pattern);
        line.push_str("|stopwords=");
        line.push_str(&stopwords.join(","));
        line
    }

    /// Parses the form produced by [`to_spec_line`](Self::to_spec_line).
    pub fn from_spec_line(line: &str) -> Result<Self, ChainParseError> {
        let mut stages = None;
        let mut parts = None;
        let mut original = None;
        let mut pattern = None;
        let mut stopwords = None;
        for section in line.split('|') {
            let (key, value) = section
                .split_once('=')
                .ok_or_else(|| ChainParseError::new("section missing '='", section))?;
            match key {
                "stages" => {
                    let mut list = Vec::new();
                    for name in value.split(',').filter(|s| !s.is_empty()) {
                        list.push(
                            Stage::from_name(name)
                                .ok_or_else(|| ChainParseError::new("unknown stage", name))?,
                        );
                    }
                    stages = Some(list);
                }
                "parts" => parts = Some(parse_bool(value)?),
                "original" => original = Some(parse_bool(value)?),
                "pattern" => {
                    pattern = Some(if value == "possessive" {
                        PatternRule::Possessive
                    } else if let Some(rest) = value.strip_prefix("literal:") {
                        let (find, replace) = rest
                            .split_once(':')
                            .ok_or_else(|| ChainParseError::new("bad literal pattern", value))?;
                        PatternRule::Literal { find: decode(find)?, replace: decode(replace)? }
                    } else {
                        return Err(ChainParseError::new("unknown pattern rule", value));
                    });
                }
                "stopwords" => {
                    let mut set = BTreeSet::new();
                    for word in value.split(',').filter(|s| !s.is_empty()) {
                        set.insert(decode(word)?);
                    }
                    stopwords = Some(set);
                }
                _ => return Err(ChainParseError::new("unknown section", key)),
            }
        }
        let missing = |name: &str| ChainParseError::new("missing section", name);
        Ok(AnalysisChain {
            stages: stages.ok_or_else(|| missing("stages"))?,
            stopwords: stopwords.ok_or_else(|| missing("stopwords"))?,
            pattern_rule: pattern.ok_or_else(|| missing("pattern"))?,
            word_delimiter_flags: WordDelimiterFlags {
                generate_word_parts: parts.ok_or_else(|| missing("parts"))?,
                preserve_original: original.ok_or_else(|| missing("original"))?,
            },
        })
    }
}

/// Free-function form of [`AnalysisChain::analyze`].
pub fn analyze(text: &str, chain: &AnalysisChain) -> Vec<String> {
    chain.analyze(text)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainParseError {
    message: &'static str,
    input: String,
}

impl ChainParseError {
    fn new(message: &'static str, input: &str) -> Self {
        ChainParseError { message, input: input.to_owned() }
    }
}

impl fmt::Display for ChainParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid analysis chain: {} at {:?}", self.message, self.input)
    }
}

impl core::error::Error for ChainParseError {}

fn parse_bool(value: &str) -> Result<bool, ChainParseError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ChainParseError::new("expected true or false", value)),
    }
}

/// Percent-encodes every byte outside [A-Za-z0-9].
fn encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() {
            out.push(b as char);
        } else {
            out.push('%');
            out.push(char::from_digit((b >> 4) as u32, 16).unwrap().to_ascii_uppercase());
            out.push(char::from_digit((b & 0xf) as u32, 16).unwrap().to_ascii_uppercase());
        }
    }
    out
}

fn decode(s: &str) -> Result<String, ChainParseError> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes
                .get(i + 1..i + 3)
                .and_then(|h| core::str::from_utf8(h).ok())
                .and_then(|h| u8::from_str_radix(h, 16).ok())
                .ok_or_else(|| ChainParseError::new("bad percent escape", s))?;
            out.push(hex);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| ChainParseError::new("escape is not utf-8", s))
}

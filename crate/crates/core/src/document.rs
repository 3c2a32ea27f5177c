//! Structured citation records and the eight searchable fields.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One parsed citation. Missing source elements map to empty text, empty
/// lists, or an absent year; they are never represented as errors here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PubMedDocument {
    /// Non-empty, decimal digits only.
    pub pmid: String,
    pub title: String,
    /// All abstract segments joined with single spaces.
    pub abstract_text: String,
    /// One entry per author, "LastName ForeName" or "LastName Initials".
    pub authors: Vec<String>,
    pub journal_title: String,
    pub year: Option<u16>,
    /// Descriptor names, each followed by its qualifier names.
    pub mesh_headings: Vec<String>,
    /// Journal title abbreviation.
    pub medline_ta: String,
}

/// The field identifiers the schemata draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldId {
    Title,
    Abstract,
    Pmid,
    Authors,
    Journal,
    Year,
    Mhl,
    Mta,
}

impl FieldId {
    pub const ALL: [FieldId; 8] = [
        FieldId::Title,
        FieldId::Abstract,
        FieldId::Pmid,
        FieldId::Authors,
        FieldId::Journal,
        FieldId::Year,
        FieldId::Mhl,
        FieldId::Mta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldId::Title => "title",
            FieldId::Abstract => "abstract",
            FieldId::Pmid => "pmid",
            FieldId::Authors => "authors",
            FieldId::Journal => "journal",
            FieldId::Year => "year",
            FieldId::Mhl => "mhl",
            FieldId::Mta => "mta",
        }
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownFieldError {
    pub name: String,
}

impl fmt::Display for UnknownFieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown field identifier {:?}", self.name)
    }
}

impl core::error::Error for UnknownFieldError {}

impl core::str::FromStr for FieldId {
    type Err = UnknownFieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| UnknownFieldError { name: String::from(s) })
    }
}

impl PubMedDocument {
    /// Canonical single text string for a field: lists joined with single
    /// spaces, absent year rendered as the empty string.
    pub fn field_text(&self, field: FieldId) -> String {
        match field {
            FieldId::Title => self.title.clone(),
            FieldId::Abstract => self.abstract_text.clone(),
            FieldId::Pmid => self.pmid.clone(),
            FieldId::Authors => self.authors.join(" "),
            FieldId::Journal => self.journal_title.clone(),
            FieldId::Year => match self.year {
                Some(y) => {
                    let mut s = String::new();
                    fmt::write(&mut s, format_args!("{y}")).expect("write to string");
                    s
                }
                None => String::new(),
            },
            FieldId::Mhl => self.mesh_headings.join(" "),
            FieldId::Mta => self.medline_ta.clone(),
        }
    }
}

/// Numeric order for PMID strings (digits, no leading zeros): length first,
/// then bytes. Used for all ranking tie-breaks.
pub fn pmid_order(a: &str, b: &str) -> core::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.as_bytes().cmp(b.as_bytes()))
}

/// String-keyed form of [`PubMedDocument::field_text`]; fails on identifiers
/// outside the eight known fields.
pub fn field_text(doc: &PubMedDocument, field: &str) -> Result<String, UnknownFieldError> {
    let id: FieldId = field.parse()?;
    Ok(doc.field_text(id))
}

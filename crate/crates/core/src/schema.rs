//! The five field schemata: fixed, ordered combinations of citation fields.

use crate::document::{FieldId, PubMedDocument};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Schema identifiers, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaId {
    Baseline,
    OneAjy,
    TwoMhl,
    TwoMta,
    TwoMhlMta,
}

impl SchemaId {
    pub const ALL: [SchemaId; 5] = [
        SchemaId::Baseline,
        SchemaId::OneAjy,
        SchemaId::TwoMhl,
        SchemaId::TwoMta,
        SchemaId::TwoMhlMta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemaId::Baseline => "baseline",
            SchemaId::OneAjy => "1+AJY",
            SchemaId::TwoMhl => "2+MHL",
            SchemaId::TwoMta => "2+MTA",
            SchemaId::TwoMhlMta => "2+MHLMTA",
        }
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSchemaError {
    pub name: String,
}

impl fmt::Display for UnknownSchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown schema {:?} (expected one of baseline, 1+AJY, 2+MHL, 2+MTA, 2+MHLMTA)", self.name)
    }
}

impl core::error::Error for UnknownSchemaError {}

impl core::str::FromStr for SchemaId {
    type Err = UnknownSchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemaId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| UnknownSchemaError { name: String::from(s) })
    }
}

/// An ordered field combination. Field order is fixed per schema so
/// concatenation is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSchema {
    pub id: SchemaId,
    pub fields: &'static [FieldId],
}

const BASELINE: &[FieldId] = &[FieldId::Title, FieldId::Abstract, FieldId::Pmid];
const ONE_AJY: &[FieldId] = &[
    FieldId::Title,
    FieldId::Abstract,
    FieldId::Pmid,
    FieldId::Authors,
    FieldId::Journal,
    FieldId::Year,
];
const TWO_MHL: &[FieldId] = &[
    FieldId::Title,
    FieldId::Abstract,
    FieldId::Pmid,
    FieldId::Authors,
    FieldId::Journal,
    FieldId::Year,
    FieldId::Mhl,
];
const TWO_MTA: &[FieldId] = &[
    FieldId::Title,
    FieldId::Abstract,
    FieldId::Pmid,
    FieldId::Authors,
    FieldId::Journal,
    FieldId::Year,
    FieldId::Mta,
];
const TWO_MHLMTA: &[FieldId] = &[
    FieldId::Title,
    FieldId::Abstract,
    FieldId::Pmid,
    FieldId::Authors,
    FieldId::Journal,
    FieldId::Year,
    FieldId::Mhl,
    FieldId::Mta,
];

impl FieldSchema {
    pub fn of(id: SchemaId) -> Self {
        let fields = match id {
            SchemaId::Baseline => BASELINE,
            SchemaId::OneAjy => ONE_AJY,
            SchemaId::TwoMhl => TWO_MHL,
            SchemaId::TwoMta => TWO_MTA,
            SchemaId::TwoMhlMta => TWO_MHLMTA,
        };
        FieldSchema { id, fields }
    }

    /// The document's searchable text: schema fields joined with single
    /// spaces, in schema order.
    pub fn searchable_text(&self, doc: &PubMedDocument) -> String {
        let parts: Vec<String> = self.fields.iter().map(|&f| doc.field_text(f)).collect();
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn schema_field_lists_nest_as_specified() {
        let base = FieldSchema::of(SchemaId::Baseline).fields;
        let ajy = FieldSchema::of(SchemaId::OneAjy).fields;
        assert_eq!(base, &[FieldId::Title, FieldId::Abstract, FieldId::Pmid]);
        assert_eq!(&ajy[..3], base);
        assert_eq!(&ajy[3..], &[FieldId::Authors, FieldId::Journal, FieldId::Year]);
        let mhl = FieldSchema::of(SchemaId::TwoMhl).fields;
        assert_eq!(&mhl[..6], ajy);
        assert_eq!(mhl[6], FieldId::Mhl);
        let mta = FieldSchema::of(SchemaId::TwoMta).fields;
        assert_eq!(&mta[..6], ajy);
        assert_eq!(mta[6], FieldId::Mta);
        let both = FieldSchema::of(SchemaId::TwoMhlMta).fields;
        assert_eq!(&both[..6], ajy);
        assert_eq!(&both[6..], &[FieldId::Mhl, FieldId::Mta]);
    }

    #[test]
    fn names_round_trip() {
        for id in SchemaId::ALL {
            assert_eq!(id.name().parse::<SchemaId>().unwrap(), id);
        }
        assert!("3+XYZ".parse::<SchemaId>().is_err());
    }

    #[test]
    fn searchable_text_concatenates_in_order() {
        let doc = PubMedDocument {
            pmid: "9".to_string(),
            title: "T".to_string(),
            abstract_text: "A".to_string(),
            authors: vec!["Smith J".to_string()],
            journal_title: "J".to_string(),
            year: Some(2001),
            mesh_headings: vec!["M".to_string()],
            medline_ta: "TA".to_string(),
        };
        assert_eq!(FieldSchema::of(SchemaId::Baseline).searchable_text(&doc), "T A 9");
        assert_eq!(
            FieldSchema::of(SchemaId::TwoMhlMta).searchable_text(&doc),
            "T A 9 Smith J J 2001 M TA"
        );
    }
}

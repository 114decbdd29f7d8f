//! Field selection for paper lookups: only requested fields are populated.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::record::{Author, PaperRecord, Section};

/// Every requestable field name, exactly as documented in the corpus file
/// format.
pub const FIELD_NAMES: &[&str] = &[
    "corpus_id",
    "title",
    "abstract",
    "sections",
    "authors",
    "year",
    "publication_date",
    "venue",
    "citation_count",
    "reference_count",
    "influential_citation_count",
    "references",
];

/// A paper with only the requested fields present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialPaper {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(rename = "abstract", skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<Section>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub authors: Option<Vec<Author>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub year: Option<Option<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub publication_date: Option<Option<NaiveDate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub influential_citation_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub references: Option<Vec<String>>,
}

/// Project a record onto the requested fields. Field names must already be
/// validated against [`FIELD_NAMES`].
pub fn project(record: &PaperRecord, fields: &[String]) -> PartialPaper {
    let mut partial = PartialPaper::default();
    for field in fields {
        match field.as_str() {
            "corpus_id" => partial.corpus_id = Some(record.corpus_id.clone()),
            "title" => partial.title = Some(record.title.clone()),
            "abstract" => partial.abstract_text = Some(record.abstract_text.clone()),
            "sections" => partial.sections = Some(record.sections.clone()),
            "authors" => partial.authors = Some(record.authors.clone()),
            "year" => partial.year = Some(record.year),
            "publication_date" => partial.publication_date = Some(record.publication_date),
            "venue" => partial.venue = Some(record.venue.clone()),
            "citation_count" => partial.citation_count = Some(record.citation_count),
            "reference_count" => partial.reference_count = Some(record.reference_count),
            "influential_citation_count" => {
                partial.influential_citation_count = Some(record.influential_citation_count)
            }
            "references" => partial.references = Some(record.references.clone()),
            _ => unreachable!("field names are validated before projection"),
        }
    }
    partial
}

//! The paper record: the unit of the corpus.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// One author credit on a paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    pub author_id: String,
    pub name: String,
}

/// A full-text paragraph with its per-paragraph citation annotations.
/// Cited ids come from explicit corpus-file annotations, never from
/// free-text parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cites: Vec<String>,
}

/// A titled full-text section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub heading: String,
    pub paragraphs: Vec<Paragraph>,
}

/// One paper: identifiers, metadata, full text, and reference edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub corpus_id: String,
    pub title: String,
    #[serde(default)]
    pub abstract_text: String,
    #[serde(default)]
    pub sections: Vec<Section>,
    #[serde(default)]
    pub authors: Vec<Author>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub publication_date: Option<NaiveDate>,
    #[serde(default)]
    pub venue: String,
    #[serde(default)]
    pub citation_count: u64,
    #[serde(default)]
    pub reference_count: u64,
    #[serde(default)]
    pub influential_citation_count: u64,
    #[serde(default)]
    pub references: Vec<String>,
}

impl PaperRecord {
    /// Unified lexical field: title, abstract, and body text concatenated.
    pub fn unified_text(&self) -> String {
        let mut text = String::with_capacity(self.title.len() + self.abstract_text.len() + 64);
        text.push_str(&self.title);
        text.push('\n');
        text.push_str(&self.abstract_text);
        for section in &self.sections {
            text.push('\n');
            text.push_str(&section.heading);
            for paragraph in &section.paragraphs {
                text.push('\n');
                text.push_str(&paragraph.text);
            }
        }
        text
    }
}

/// Exclusive upper bound on publication date: a paper passes iff its
/// publication date is strictly before the cutoff. Papers with no
/// publication date fail every cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateCutoff(pub NaiveDate);

impl DateCutoff {
    pub fn passes(&self, record: &PaperRecord) -> bool {
        match record.publication_date {
            Some(date) => date < self.0,
            None => false,
        }
    }
}

/// Cutoff-aware admission check for optional cutoffs.
pub fn passes_cutoff(record: &PaperRecord, cutoff: Option<DateCutoff>) -> bool {
    cutoff.map(|c| c.passes(record)).unwrap_or(true)
}

/// Resolve an external id form to the raw corpus key. Supported forms:
/// the raw key itself and the `CorpusId:<id>` prefix form.
pub fn resolve_id_form(id: &str) -> &str {
    id.strip_prefix("CorpusId:").unwrap_or(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper(date: Option<&str>) -> PaperRecord {
        PaperRecord {
            corpus_id: "1".into(),
            title: "t".into(),
            abstract_text: String::new(),
            sections: vec![],
            authors: vec![],
            year: None,
            publication_date: date.map(|d| d.parse().unwrap()),
            venue: String::new(),
            citation_count: 0,
            reference_count: 0,
            influential_citation_count: 0,
            references: vec![],
        }
    }

    #[test]
    fn cutoff_is_exclusive() {
        let cutoff = DateCutoff("2024-10-17".parse().unwrap());
        assert!(!cutoff.passes(&paper(Some("2024-10-17"))));
        assert!(cutoff.passes(&paper(Some("2024-10-16"))));
        assert!(!cutoff.passes(&paper(Some("2024-10-18"))));
    }

    #[test]
    fn missing_date_fails_every_cutoff() {
        let cutoff = DateCutoff("2999-01-01".parse().unwrap());
        assert!(!cutoff.passes(&paper(None)));
    }

    #[test]
    fn id_forms() {
        assert_eq!(resolve_id_form("215416146"), "215416146");
        assert_eq!(resolve_id_form("CorpusId:215416146"), "215416146");
    }
}

//! Immutable scholarly paper corpus with keyword search, snippet search,
//! a citation graph, author lookup, and title resolution — all filterable
//! by an exclusive publication-date cutoff for reproducible evaluation.

pub mod corpus;
pub mod corpus_file;
pub mod fields;
pub mod index;
pub mod record;

pub use corpus::{
    ingest_corpus, normalize_title, title_similarity, Corpus, CorpusError, Direction, IngestError,
    ScoredPaper, SnippetSearchResult, TitleMatch, SNIPPET_MAX_CHARS, TITLE_CONFIDENCE_THRESHOLD,
};
pub use corpus_file::{read_corpus_file, write_corpus_file, CorpusFileError, SCHEMA};
pub use fields::{PartialPaper, FIELD_NAMES};
pub use record::{passes_cutoff, resolve_id_form, Author, DateCutoff, PaperRecord, Paragraph, Section};

use serde::{Deserialize, Serialize};

/// A contiguous full-text passage with its retrieval score. `span` holds
/// char offsets within the source paragraph; `cited_ids` are the explicit
/// per-paragraph citation annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snippet {
    pub paper_id: String,
    pub section_index: usize,
    pub paragraph_index: usize,
    pub span: (usize, usize),
    pub text: String,
    pub score: f64,
    pub cited_ids: Vec<String>,
}

//! The immutable corpus: ingest-time validation, index construction, and
//! all read operations. Every read is cutoff-aware and deterministic.

use std::collections::{BTreeMap, BTreeSet};

use crate::fields::{project, PartialPaper, FIELD_NAMES};
use crate::index::Bm25Index;
use crate::record::{passes_cutoff, resolve_id_form, DateCutoff, PaperRecord};
use crate::Snippet;

/// Snippet granularity: one paragraph, split when it overflows this many
/// characters.
pub const SNIPPET_MAX_CHARS: usize = 1_200;

/// Similarity at or above which a title lookup counts as confident.
pub const TITLE_CONFIDENCE_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IngestError {
    #[error("duplicate corpus_id {0}")]
    DuplicateId(String),
    #[error("malformed record {corpus_id}: field {field}: {reason}")]
    Malformed { corpus_id: String, field: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("query must not be empty")]
    EmptyQuery,
    #[error("title must not be empty")]
    EmptyTitle,
    #[error("paper not found: {0}")]
    PaperNotFound(String),
    #[error("author not found: {0}")]
    AuthorNotFound(String),
    #[error("invalid field name: {0}")]
    InvalidField(String),
    #[error("id list must not be empty")]
    EmptyIdList,
}

/// Citation direction: forward finds papers citing the target, backward
/// finds papers the target cites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Ranked snippets plus non-fatal warnings (e.g. unknown ids in a
/// paper-id restriction, which agents probe speculatively).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SnippetSearchResult {
    pub snippets: Vec<Snippet>,
    pub warnings: Vec<String>,
}

/// A paper with its lexical relevance score.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ScoredPaper {
    pub record: PaperRecord,
    pub score: f64,
}

/// Best title match with its normalized-title similarity.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TitleMatch {
    pub record: PaperRecord,
    pub score: f64,
}

#[derive(Debug, Clone)]
struct SnippetUnit {
    paper: usize,
    section_index: usize,
    paragraph_index: usize,
    span: (usize, usize),
    text: String,
}

/// Immutable after ingest; all reads are safe for unbounded concurrency.
pub struct Corpus {
    records: Vec<PaperRecord>,
    by_id: BTreeMap<String, usize>,
    paper_index: Bm25Index,
    snippet_units: Vec<SnippetUnit>,
    snippet_index: Bm25Index,
    /// cited id -> ordinals of papers citing it
    forward_edges: BTreeMap<String, Vec<usize>>,
    /// author_id -> (display name, paper ordinals)
    authors: BTreeMap<String, (String, Vec<usize>)>,
    normalized_titles: Vec<String>,
}

/// Build the immutable indexes from a record stream. Duplicate ids and
/// malformed records are rejected with field-level diagnostics.
pub fn ingest_corpus(
    records: impl IntoIterator<Item = PaperRecord>,
) -> Result<Corpus, IngestError> {
    let mut validated: Vec<PaperRecord> = Vec::new();
    let mut by_id = BTreeMap::new();
    for record in records {
        validate(&record)?;
        if by_id.insert(record.corpus_id.clone(), validated.len()).is_some() {
            return Err(IngestError::DuplicateId(record.corpus_id));
        }
        validated.push(record);
    }

    let paper_index = Bm25Index::build(validated.iter().map(|r| r.unified_text()));

    let mut snippet_units = Vec::new();
    for (ordinal, record) in validated.iter().enumerate() {
        for (section_index, section) in record.sections.iter().enumerate() {
            for (paragraph_index, paragraph) in section.paragraphs.iter().enumerate() {
                for (span, text) in split_paragraph(&paragraph.text) {
                    snippet_units.push(SnippetUnit {
                        paper: ordinal,
                        section_index,
                        paragraph_index,
                        span,
                        text,
                    });
                }
            }
        }
    }
    let snippet_index = Bm25Index::build(snippet_units.iter().map(|u| u.text.clone()));

    let mut forward_edges: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut authors: BTreeMap<String, (String, Vec<usize>)> = BTreeMap::new();
    for (ordinal, record) in validated.iter().enumerate() {
        for reference in &record.references {
            forward_edges.entry(reference.clone()).or_default().push(ordinal);
        }
        for author in &record.authors {
            authors
                .entry(author.author_id.clone())
                .or_insert_with(|| (author.name.clone(), Vec::new()))
                .1
                .push(ordinal);
        }
    }

    let normalized_titles = validated.iter().map(|r| normalize_title(&r.title)).collect();

    Ok(Corpus {
        records: validated,
        by_id,
        paper_index,
        snippet_units,
        snippet_index,
        forward_edges,
        authors,
        normalized_titles,
    })
}

fn validate(record: &PaperRecord) -> Result<(), IngestError> {
    let malformed = |field: &str, reason: String| IngestError::Malformed {
        corpus_id: record.corpus_id.clone(),
        field: field.to_string(),
        reason,
    };
    if record.corpus_id.is_empty() {
        return Err(malformed("corpus_id", "must not be empty".into()));
    }
    if record.references.iter().any(|r| r == &record.corpus_id) {
        return Err(malformed("references", "record references itself".into()));
    }
    if let (Some(year), Some(date)) = (record.year, record.publication_date) {
        use chrono::Datelike;
        if date.year() != year {
            return Err(malformed(
                "year",
                format!("year {year} disagrees with publication_date {date}"),
            ));
        }
    }
    Ok(())
}

/// Split a paragraph into snippet units of at most [`SNIPPET_MAX_CHARS`]
/// characters, returning char-offset spans within the paragraph.
fn split_paragraph(text: &str) -> Vec<((usize, usize), String)> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    let mut units = Vec::new();
    let mut start = 0;
    while start < chars.len() {
        let end = (start + SNIPPET_MAX_CHARS).min(chars.len());
        units.push(((start, end), chars[start..end].iter().collect()));
        start = end;
    }
    units
}

/// Lowercase, keep alphanumerics, collapse separator runs to single spaces.
pub fn normalize_title(title: &str) -> String {
    let mut normalized = String::with_capacity(title.len());
    let mut pending_space = false;
    for c in title.chars() {
        if c.is_alphanumeric() {
            if pending_space && !normalized.is_empty() {
                normalized.push(' ');
            }
            pending_space = false;
            normalized.extend(c.to_lowercase());
        } else {
            pending_space = true;
        }
    }
    normalized
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut current = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        current[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            current[j + 1] = substitution.min(prev[j + 1] + 1).min(current[j] + 1);
        }
        std::mem::swap(&mut prev, &mut current);
    }
    prev[b.len()]
}

/// Normalized edit similarity of two already-normalized titles, in [0,1].
pub fn title_similarity(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / max_len as f64
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn paper_ids(&self) -> impl Iterator<Item = &str> {
        self.by_id.keys().map(|k| k.as_str())
    }

    pub fn record(&self, id: &str) -> Option<&PaperRecord> {
        self.by_id.get(resolve_id_form(id)).map(|&ordinal| &self.records[ordinal])
    }

    /// Ranked passage retrieval, optionally restricted by cutoff and to a
    /// set of paper ids. Unknown restriction ids are reported as warnings,
    /// not errors.
    pub fn snippet_search(
        &self,
        query: &str,
        limit: usize,
        cutoff: Option<DateCutoff>,
        paper_ids: Option<&BTreeSet<String>>,
    ) -> Result<SnippetSearchResult, CorpusError> {
        if query.trim().is_empty() {
            return Err(CorpusError::EmptyQuery);
        }
        let mut warnings = Vec::new();
        let allowed: Option<BTreeSet<usize>> = paper_ids.map(|ids| {
            ids.iter()
                .filter_map(|id| {
                    let resolved = resolve_id_form(id);
                    match self.by_id.get(resolved) {
                        Some(&ordinal) => Some(ordinal),
                        None => {
                            warnings.push(format!("unknown paper id in restriction: {id}"));
                            None
                        }
                    }
                })
                .collect()
        });

        let mut scored: Vec<(usize, f64)> = self
            .snippet_index
            .score(query)
            .into_iter()
            .filter(|(ordinal, _)| {
                let unit = &self.snippet_units[*ordinal];
                if let Some(allowed) = &allowed {
                    if !allowed.contains(&unit.paper) {
                        return false;
                    }
                }
                passes_cutoff(&self.records[unit.paper], cutoff)
            })
            .collect();

        scored.sort_by(|(a, sa), (b, sb)| {
            sb.partial_cmp(sa).unwrap().then_with(|| {
                let ua = &self.snippet_units[*a];
                let ub = &self.snippet_units[*b];
                self.records[ua.paper]
                    .corpus_id
                    .cmp(&self.records[ub.paper].corpus_id)
                    .then(ua.section_index.cmp(&ub.section_index))
                    .then(ua.paragraph_index.cmp(&ub.paragraph_index))
                    .then(ua.span.0.cmp(&ub.span.0))
            })
        });

        let snippets = scored
            .into_iter()
            .take(limit)
            .map(|(ordinal, score)| {
                let unit = &self.snippet_units[ordinal];
                let record = &self.records[unit.paper];
                Snippet {
                    paper_id: record.corpus_id.clone(),
                    section_index: unit.section_index,
                    paragraph_index: unit.paragraph_index,
                    span: unit.span,
                    text: unit.text.clone(),
                    score,
                    cited_ids: record.sections[unit.section_index].paragraphs
                        [unit.paragraph_index]
                        .cites
                        .clone(),
                }
            })
            .collect();
        Ok(SnippetSearchResult { snippets, warnings })
    }

    /// Paper-granular lexical search over title + abstract + body.
    pub fn search_papers_by_relevance(
        &self,
        query: &str,
        limit: usize,
        cutoff: Option<DateCutoff>,
    ) -> Result<Vec<ScoredPaper>, CorpusError> {
        if query.trim().is_empty() {
            return Err(CorpusError::EmptyQuery);
        }
        let mut scored: Vec<(usize, f64)> = self
            .paper_index
            .score(query)
            .into_iter()
            .filter(|(ordinal, _)| passes_cutoff(&self.records[*ordinal], cutoff))
            .collect();
        scored.sort_by(|(a, sa), (b, sb)| {
            sb.partial_cmp(sa)
                .unwrap()
                .then_with(|| self.records[*a].corpus_id.cmp(&self.records[*b].corpus_id))
        });
        Ok(scored
            .into_iter()
            .take(limit)
            .map(|(ordinal, score)| ScoredPaper { record: self.records[ordinal].clone(), score })
            .collect())
    }

    /// Look up one paper by any supported id form, projecting onto the
    /// requested fields.
    pub fn get_paper(&self, id: &str, fields: &[String]) -> Result<PartialPaper, CorpusError> {
        for field in fields {
            if !FIELD_NAMES.contains(&field.as_str()) {
                return Err(CorpusError::InvalidField(field.clone()));
            }
        }
        let record = self.record(id).ok_or_else(|| CorpusError::PaperNotFound(id.to_string()))?;
        Ok(project(record, fields))
    }

    /// Positional batch lookup; per-id failures do not abort the batch.
    pub fn get_paper_batch(
        &self,
        ids: &[String],
        fields: &[String],
    ) -> Result<Vec<(String, Result<PartialPaper, CorpusError>)>, CorpusError> {
        if ids.is_empty() {
            return Err(CorpusError::EmptyIdList);
        }
        Ok(ids.iter().map(|id| (id.clone(), self.get_paper(id, fields))).collect())
    }

    /// Forward: papers whose references include the target. Backward:
    /// papers the target references. Results sorted by corpus_id.
    pub fn get_citations(
        &self,
        id: &str,
        direction: Direction,
        cutoff: Option<DateCutoff>,
    ) -> Result<Vec<PaperRecord>, CorpusError> {
        let resolved = resolve_id_form(id);
        if !self.by_id.contains_key(resolved) {
            return Err(CorpusError::PaperNotFound(id.to_string()));
        }
        let mut results: Vec<PaperRecord> = match direction {
            Direction::Forward => self
                .forward_edges
                .get(resolved)
                .map(|ordinals| ordinals.iter().map(|&o| self.records[o].clone()).collect())
                .unwrap_or_default(),
            Direction::Backward => {
                let record = &self.records[self.by_id[resolved]];
                record
                    .references
                    .iter()
                    .filter_map(|r| self.by_id.get(r).map(|&o| self.records[o].clone()))
                    .collect()
            }
        };
        results.retain(|r| passes_cutoff(r, cutoff));
        results.sort_by(|a, b| a.corpus_id.cmp(&b.corpus_id));
        results.dedup_by(|a, b| a.corpus_id == b.corpus_id);
        Ok(results)
    }

    /// Best normalized-title match, if the corpus is non-empty. The score
    /// is reported so callers can threshold (0.9 is the conventional
    /// confident-match bar).
    pub fn search_paper_by_title(&self, title: &str) -> Result<Option<TitleMatch>, CorpusError> {
        if title.trim().is_empty() {
            return Err(CorpusError::EmptyTitle);
        }
        let needle = normalize_title(title);
        let best = self
            .normalized_titles
            .iter()
            .enumerate()
            .map(|(ordinal, candidate)| (ordinal, title_similarity(&needle, candidate)))
            .max_by(|(a, sa), (b, sb)| {
                sa.partial_cmp(sb)
                    .unwrap()
                    // Prefer the lexicographically smaller id on ties.
                    .then_with(|| {
                        self.records[*b].corpus_id.cmp(&self.records[*a].corpus_id)
                    })
            });
        Ok(best.map(|(ordinal, score)| TitleMatch { record: self.records[ordinal].clone(), score }))
    }

    /// Candidate (author_id, name) pairs whose display name contains the
    /// query, case-insensitively.
    pub fn search_authors_by_name(&self, name: &str) -> Vec<(String, String)> {
        let needle = name.to_lowercase();
        self.authors
            .iter()
            .filter(|(_, (display, _))| display.to_lowercase().contains(&needle))
            .map(|(id, (display, _))| (id.clone(), display.clone()))
            .collect()
    }

    /// All papers credited to the author that pass the cutoff.
    pub fn get_author_papers(
        &self,
        author_id: &str,
        cutoff: Option<DateCutoff>,
    ) -> Result<Vec<PaperRecord>, CorpusError> {
        let (_, ordinals) = self
            .authors
            .get(author_id)
            .ok_or_else(|| CorpusError::AuthorNotFound(author_id.to_string()))?;
        let mut papers: Vec<PaperRecord> = ordinals
            .iter()
            .map(|&o| self.records[o].clone())
            .filter(|r| passes_cutoff(r, cutoff))
            .collect();
        papers.sort_by(|a, b| a.corpus_id.cmp(&b.corpus_id));
        Ok(papers)
    }

    pub fn records(&self) -> &[PaperRecord] {
        &self.records
    }
}

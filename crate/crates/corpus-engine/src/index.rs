//! Tokenization and the BM25 inverted index shared by paper-level and
//! snippet-level search.

use std::collections::BTreeMap;

/// Lowercased alphanumeric tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;

/// Inverted index over a fixed document list with BM25 scoring
/// (k1 = 1.2, b = 0.75, idf = ln(1 + (N - df + 0.5)/(df + 0.5))).
#[derive(Debug, Default)]
pub struct Bm25Index {
    /// term -> (doc ordinal -> term frequency)
    postings: BTreeMap<String, BTreeMap<usize, usize>>,
    doc_lengths: Vec<usize>,
    avg_doc_length: f64,
}

impl Bm25Index {
    pub fn build(docs: impl Iterator<Item = String>) -> Self {
        let mut postings: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
        let mut doc_lengths = Vec::new();
        for (ordinal, text) in docs.enumerate() {
            let tokens = tokenize(&text);
            doc_lengths.push(tokens.len());
            for token in tokens {
                *postings.entry(token).or_default().entry(ordinal).or_insert(0) += 1;
            }
        }
        let avg_doc_length = if doc_lengths.is_empty() {
            0.0
        } else {
            doc_lengths.iter().sum::<usize>() as f64 / doc_lengths.len() as f64
        };
        Bm25Index { postings, doc_lengths, avg_doc_length }
    }

    pub fn len(&self) -> usize {
        self.doc_lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_lengths.is_empty()
    }

    fn idf(&self, term: &str) -> f64 {
        let n = self.doc_lengths.len() as f64;
        let df = self.postings.get(term).map(|p| p.len()).unwrap_or(0) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// BM25 scores for every document matching at least one query term,
    /// as (doc ordinal -> score).
    pub fn score(&self, query: &str) -> BTreeMap<usize, f64> {
        let mut scores: BTreeMap<usize, f64> = BTreeMap::new();
        // Duplicate query terms contribute once per occurrence.
        for term in tokenize(query) {
            let Some(postings) = self.postings.get(&term) else { continue };
            let idf = self.idf(&term);
            for (&ordinal, &tf) in postings {
                let tf = tf as f64;
                let len_norm = 1.0 - BM25_B
                    + BM25_B * self.doc_lengths[ordinal] as f64 / self.avg_doc_length;
                let contribution = idf * tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * len_norm);
                *scores.entry(ordinal).or_insert(0.0) += contribution;
            }
        }
        scores
    }
}

//! Candidate papers with their evidence, and the deterministic embedding
//! used to pick follow-up seeds.

use std::collections::BTreeSet;

use corpus_engine::Snippet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePaper {
    pub corpus_id: String,
    pub title: String,
    pub abstract_text: String,
    /// Snippets from the paper's own text, ordered by in-paper position.
    pub own_snippets: Vec<Snippet>,
    /// Snippets from other papers whose citations produced this candidate.
    pub citing_snippets: Vec<Snippet>,
    /// Which query or strategy produced the candidate.
    pub sources: BTreeSet<String>,
}

impl CandidatePaper {
    pub fn new(corpus_id: impl Into<String>) -> Self {
        CandidatePaper {
            corpus_id: corpus_id.into(),
            title: String::new(),
            abstract_text: String::new(),
            own_snippets: vec![],
            citing_snippets: vec![],
            sources: BTreeSet::new(),
        }
    }

    /// All evidence text, own snippets first, then citing snippets, then
    /// title and abstract.
    pub fn evidence_texts(&self) -> Vec<String> {
        let mut texts: Vec<String> =
            self.own_snippets.iter().map(|s| s.text.clone()).collect();
        texts.extend(self.citing_snippets.iter().map(|s| s.text.clone()));
        if !self.title.is_empty() {
            texts.push(self.title.clone());
        }
        if !self.abstract_text.is_empty() {
            texts.push(self.abstract_text.clone());
        }
        texts
    }

    pub fn embedding_text(&self) -> String {
        self.evidence_texts().join(" ")
    }
}

/// Text embedding used for follow-up seed selection. Pluggable; the default
/// is a hashed bag-of-words, deterministic across runs and platforms.
pub trait Embedder: Send + Sync {
    fn embed(&self, text: &str) -> Vec<f64>;
}

pub const HASHED_BOW_DIMS: usize = 64;

/// FNV-1a over each token, bucketed into a fixed number of dimensions and
/// L2-normalized.
#[derive(Debug, Default, Clone)]
pub struct HashedBagOfWords;

fn fnv1a(token: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in token.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

impl Embedder for HashedBagOfWords {
    fn embed(&self, text: &str) -> Vec<f64> {
        let mut vector = vec![0.0; HASHED_BOW_DIMS];
        for token in text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(|t| t.to_lowercase())
        {
            vector[(fnv1a(&token) % HASHED_BOW_DIMS as u64) as usize] += 1.0;
        }
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut vector {
                *x /= norm;
            }
        }
        vector
    }
}

/// 1 − cosine similarity; 1.0 when either vector is zero.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    1.0 - dot / (na * nb)
}

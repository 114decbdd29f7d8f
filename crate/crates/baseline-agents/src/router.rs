//! Lexical task router: ranks task types by character 3-gram Jaccard
//! similarity between the input and the closest exemplar of each type,
//! then dispatches with fallback.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_ATTEMPTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub label: String,
    pub text: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExemplarBank {
    exemplars: Vec<Exemplar>,
}

#[derive(Debug, thiserror::Error)]
pub enum RouterError {
    #[error("exemplar bank is empty")]
    EmptyBank,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("record {line}: {source}")]
    Malformed { line: usize, source: serde_json::Error },
    #[error("routing exhausted after {0} attempts")]
    Exhausted(usize),
}

impl ExemplarBank {
    pub fn new(exemplars: Vec<Exemplar>) -> Result<Self, RouterError> {
        if exemplars.is_empty() {
            return Err(RouterError::EmptyBank);
        }
        Ok(ExemplarBank { exemplars })
    }

    /// One JSON record per line: `{"label": ..., "text": ...}`.
    pub fn from_file(path: &std::path::Path) -> Result<Self, RouterError> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut exemplars = Vec::new();
        for (i, line) in file.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            exemplars.push(
                serde_json::from_str(&line)
                    .map_err(|source| RouterError::Malformed { line: i + 1, source })?,
            );
        }
        ExemplarBank::new(exemplars)
    }

    pub fn labels(&self) -> BTreeSet<&str> {
        self.exemplars.iter().map(|e| e.label.as_str()).collect()
    }

    pub fn exemplars(&self) -> &[Exemplar] {
        &self.exemplars
    }
}

/// Character 3-grams over the raw text (shorter texts contribute their
/// whole text as a single gram).
fn trigrams(text: &str) -> BTreeSet<String> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return BTreeSet::new();
    }
    if chars.len() < 3 {
        return BTreeSet::from([chars.iter().collect()]);
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

pub fn trigram_jaccard(a: &str, b: &str) -> f64 {
    let (ga, gb) = (trigrams(a), trigrams(b));
    if ga.is_empty() && gb.is_empty() {
        return 1.0;
    }
    let intersection = ga.intersection(&gb).count() as f64;
    let union = ga.union(&gb).count() as f64;
    intersection / union
}

/// Task-type ranking: each label scored by its most similar exemplar,
/// descending, ties broken by label.
pub fn route(input: &str, bank: &ExemplarBank) -> Vec<(String, f64)> {
    let mut best: BTreeMap<&str, f64> = BTreeMap::new();
    for exemplar in bank.exemplars() {
        let score = trigram_jaccard(input, &exemplar.text);
        let entry = best.entry(exemplar.label.as_str()).or_insert(f64::NEG_INFINITY);
        if score > *entry {
            *entry = score;
        }
    }
    let mut ranked: Vec<(String, f64)> =
        best.into_iter().map(|(label, score)| (label.to_string(), score)).collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    ranked
}

/// A routable sub-agent. `None` means it declined to produce an output and
/// the router moves on to the next-ranked task type.
pub trait SubAgent: Send + Sync {
    fn answer(&self, input: &str) -> Option<String>;
}

pub fn dispatch(
    input: &str,
    bank: &ExemplarBank,
    table: &BTreeMap<String, Arc<dyn SubAgent>>,
    max_attempts: usize,
) -> Result<String, RouterError> {
    let mut attempts = 0;
    for (label, _) in route(input, bank) {
        if attempts == max_attempts {
            break;
        }
        let Some(agent) = table.get(&label) else { continue };
        attempts += 1;
        if let Some(answer) = agent.answer(input) {
            return Ok(answer);
        }
    }
    Err(RouterError::Exhausted(attempts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_texts_have_similarity_one() {
        assert_eq!(trigram_jaccard("find papers", "find papers"), 1.0);
        assert_eq!(trigram_jaccard("", ""), 1.0);
        assert_eq!(trigram_jaccard("abc", "xyz"), 0.0);
    }

    #[test]
    fn short_texts_still_compare() {
        assert_eq!(trigram_jaccard("ab", "ab"), 1.0);
        assert_eq!(trigram_jaccard("a", "b"), 0.0);
    }
}

//! Retrieval metrics: result-set F1, nDCG, recall@n, estimated recall, and
//! the per-query combination used for paper-finding suites.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::MetricError;

/// Kind of search query, as it affects which metric scores it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Navigational,
    Metadata,
    Semantic,
}

/// A ranked, judged result list for one query.
///
/// `items` is the system's ranking with a relevance grade per item;
/// `gold` is the known-relevant set (empty when only judged grades exist);
/// `estimated_set_size` is the k used for estimated recall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgedRanking {
    pub items: Vec<(String, f64)>,
    pub gold: BTreeSet<String>,
    pub estimated_set_size: usize,
}

/// F1 over unordered result sets.
///
/// Both sets empty counts as a correct "nothing to return" and scores 1.
/// A non-empty prediction against empty gold (or vice versa) scores 0.
pub fn f1_result_set(predicted: &BTreeSet<String>, gold: &BTreeSet<String>) -> f64 {
    if predicted.is_empty() && gold.is_empty() {
        return 1.0;
    }
    if predicted.is_empty() || gold.is_empty() {
        return 0.0;
    }
    let hits = predicted.intersection(gold).count() as f64;
    if hits == 0.0 {
        return 0.0;
    }
    let precision = hits / predicted.len() as f64;
    let recall = hits / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Normalized discounted cumulative gain over a ranked gain list.
///
/// Gain at rank i (1-based) is discounted by 1/log2(i+1) and the sum is
/// normalized by the same sum over the ideal (descending-gain) ordering.
/// All-zero gains score 0.
pub fn ndcg(gains: &[f64]) -> f64 {
    let actual = dcg(gains.iter().copied());
    let mut ideal: Vec<f64> = gains.to_vec();
    ideal.sort_by(|a, b| b.partial_cmp(a).expect("gains must be finite"));
    let best = dcg(ideal.into_iter());
    if best == 0.0 {
        0.0
    } else {
        actual / best
    }
}

fn dcg(gains: impl Iterator<Item = f64>) -> f64 {
    gains
        .enumerate()
        .map(|(i, g)| g / ((i + 2) as f64).log2())
        .sum()
}

/// Recall against an estimated relevant-set size: relevant items within the
/// first k ranks divided by k, with k = `estimated_set_size`. Capped at 1.
///
/// An item counts as relevant when its grade is strictly positive.
pub fn estimated_recall_at_k(ranking: &JudgedRanking) -> f64 {
    let k = ranking.estimated_set_size.max(1);
    let found = ranking
        .items
        .iter()
        .take(k)
        .filter(|(_, grade)| *grade > 0.0)
        .count();
    (found as f64 / k as f64).min(1.0)
}

/// Estimated relevant-set size from the union of lenient retrieval runs.
///
/// Smaller unions are less reliable and get a larger multiplier:
/// union <= 5 -> x10, 6..=20 -> x5, > 20 -> x2. Result is at least 1.
pub fn estimated_set_size(union_size: usize) -> usize {
    let factor = match union_size {
        0..=5 => 10,
        6..=20 => 5,
        _ => 2,
    };
    (union_size * factor).max(1)
}

/// Harmonic mean of two scores in [0,1]; zero if either is zero.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Suite score for a paper-finding benchmark: the unweighted mean of
/// per-query scores, regardless of query kind. The kind accompanies each
/// score only so reports can break results down by kind.
pub fn paperfinding_suite_score(scores: &[(QueryKind, f64)]) -> Result<f64, MetricError> {
    if scores.is_empty() {
        return Err(MetricError::EmptyInput("paperfinding query set"));
    }
    Ok(scores.iter().map(|(_, s)| s).sum::<f64>() / scores.len() as f64)
}

/// Recall of the gold set within the first n ranks (n inclusive).
pub fn recall_at_n(ranked: &[String], gold: &BTreeSet<String>, n: usize) -> f64 {
    if gold.is_empty() {
        return 0.0;
    }
    let found = ranked
        .iter()
        .take(n)
        .filter(|id| gold.contains(id.as_str()))
        .count();
    found as f64 / gold.len() as f64
}

/// Multiple-choice accuracy: the fraction of questions answered correctly.
pub fn mc_accuracy(answers: &[String], keys: &[String]) -> Result<f64, MetricError> {
    if answers.len() != keys.len() {
        return Err(MetricError::LengthMismatch("answers vs keys"));
    }
    if answers.is_empty() {
        return Err(MetricError::EmptyInput("answer set"));
    }
    let correct = answers.iter().zip(keys).filter(|(a, k)| a == k).count();
    Ok(correct as f64 / answers.len() as f64)
}

//! Final result ranking: relevance tier first, then a weighted blend of
//! citation count and recency, direction set by query modifiers.

use std::cmp::Ordering;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::query::Modifier;
use crate::relevance::RelevanceTier;

pub const CITATION_WEIGHT: f64 = 0.7;
pub const RECENCY_WEIGHT: f64 = 0.3;

/// A judged candidate with the fields ranking needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankableResult {
    pub corpus_id: String,
    pub tier: RelevanceTier,
    pub citation_count: u64,
    pub publication_date: Option<NaiveDate>,
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub rank: usize,
    pub corpus_id: String,
    pub tier: RelevanceTier,
    pub score: f64,
    pub evidence: Vec<String>,
}

fn normalized(value: f64, min: f64, max: f64) -> f64 {
    if max > min {
        (value - min) / (max - min)
    } else {
        0.0
    }
}

/// Sorts by tier descending, then 0.7·normalized log-citations +
/// 0.3·recency within the tier. An early-works modifier flips the recency
/// direction (a recent modifier states the default direction explicitly).
/// Ties break by corpus_id, making the order total.
pub fn rank_results(candidates: &[RankableResult], modifiers: &[Modifier]) -> Vec<RankedResult> {
    if candidates.is_empty() {
        return vec![];
    }
    let log_cites: Vec<f64> =
        candidates.iter().map(|c| (1.0 + c.citation_count as f64).ln()).collect();
    let days: Vec<f64> = candidates
        .iter()
        .map(|c| {
            c.publication_date
                .map(|d| d.signed_duration_since(NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()).num_days() as f64)
                .unwrap_or(f64::NEG_INFINITY)
        })
        .collect();
    let (lc_min, lc_max) = bounds(&log_cites);
    let finite_days: Vec<f64> = days.iter().copied().filter(|d| d.is_finite()).collect();
    let (d_min, d_max) = bounds(&finite_days);
    let prefer_older = modifiers.contains(&Modifier::EarlyWorks);

    let score_of = |i: usize| {
        let citation = normalized(log_cites[i], lc_min, lc_max);
        let recency = if days[i].is_finite() {
            let newer = normalized(days[i], d_min, d_max);
            if prefer_older {
                1.0 - newer
            } else {
                newer
            }
        } else {
            0.0 // undated papers take the bottom of the recency scale
        };
        CITATION_WEIGHT * citation + RECENCY_WEIGHT * recency
    };

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[b]
            .tier
            .cmp(&candidates[a].tier)
            .then(score_of(b).partial_cmp(&score_of(a)).unwrap_or(Ordering::Equal))
            .then(candidates[a].corpus_id.cmp(&candidates[b].corpus_id))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(rank, i)| RankedResult {
            rank: rank + 1,
            corpus_id: candidates[i].corpus_id.clone(),
            tier: candidates[i].tier,
            score: score_of(i),
            evidence: candidates[i].evidence.clone(),
        })
        .collect()
}

fn bounds(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(min, max), &v| {
        (min.min(v), max.max(v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: &str, tier: RelevanceTier, cites: u64, date: &str) -> RankableResult {
        RankableResult {
            corpus_id: id.into(),
            tier,
            citation_count: cites,
            publication_date: Some(date.parse().unwrap()),
            evidence: vec!["e".into()],
        }
    }

    #[test]
    fn single_paper_ranks_itself() {
        let ranked = rank_results(
            &[item("A", RelevanceTier::SomewhatRelevant, 3, "2021-01-01")],
            &[],
        );
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].rank, 1);
        assert_eq!(ranked[0].corpus_id, "A");
    }

    #[test]
    fn higher_tier_beats_any_citations() {
        let ranked = rank_results(
            &[
                item("low-tier-huge", RelevanceTier::SomewhatRelevant, 100_000, "2024-01-01"),
                item("high-tier-zero", RelevanceTier::PerfectlyRelevant, 0, "2000-01-01"),
            ],
            &[],
        );
        assert_eq!(ranked[0].corpus_id, "high-tier-zero");
    }

    #[test]
    fn early_works_modifier_flips_recency() {
        let tier = RelevanceTier::HighlyRelevant;
        let pair = [item("new", tier, 10, "2024-01-01"), item("old", tier, 10, "2010-01-01")];
        let default_order = rank_results(&pair, &[]);
        assert_eq!(default_order[0].corpus_id, "new");
        let flipped = rank_results(&pair, &[Modifier::EarlyWorks]);
        assert_eq!(flipped[0].corpus_id, "old");
        let recent = rank_results(&pair, &[Modifier::Recent]);
        assert_eq!(recent[0].corpus_id, "new");
    }
}

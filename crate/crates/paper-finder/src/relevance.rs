//! Per-criterion relevance ratings and the tier combination table.

use serde::{Deserialize, Serialize};

use crate::candidate::CandidatePaper;
use crate::query::RelevanceCriterion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionRating {
    Not,
    Somewhat,
    Perfectly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelevanceTier {
    NotRelevant,
    SomewhatRelevant,
    HighlyRelevant,
    PerfectlyRelevant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceVerdict {
    pub ratings: Vec<(String, CriterionRating)>,
    pub tier: RelevanceTier,
}

/// Combination table over weighted criterion ratings:
///
/// | condition                                                | tier      |
/// |----------------------------------------------------------|-----------|
/// | every criterion rated perfectly                           | perfectly |
/// | all ≥ somewhat and weighted perfect fraction ≥ 0.5        | highly    |
/// | at least one criterion ≥ somewhat                         | somewhat  |
/// | otherwise                                                 | not       |
pub fn combine_tier(ratings: &[(f64, CriterionRating)]) -> RelevanceTier {
    if ratings.is_empty() {
        return RelevanceTier::NotRelevant;
    }
    if ratings.iter().all(|(_, r)| *r == CriterionRating::Perfectly) {
        return RelevanceTier::PerfectlyRelevant;
    }
    let total: f64 = ratings.iter().map(|(w, _)| w).sum();
    let perfect: f64 = ratings
        .iter()
        .filter(|(_, r)| *r == CriterionRating::Perfectly)
        .map(|(w, _)| w)
        .sum();
    let all_at_least_somewhat = ratings.iter().all(|(_, r)| *r >= CriterionRating::Somewhat);
    if all_at_least_somewhat && total > 0.0 && perfect / total >= 0.5 {
        return RelevanceTier::HighlyRelevant;
    }
    if ratings.iter().any(|(_, r)| *r >= CriterionRating::Somewhat) {
        return RelevanceTier::SomewhatRelevant;
    }
    RelevanceTier::NotRelevant
}

/// Rates one candidate against one criterion; production wires a model,
/// tests use [`LexicalRelevanceJudge`].
pub trait RelevanceJudge: Send + Sync {
    fn rate(&self, candidate: &CandidatePaper, criterion: &RelevanceCriterion) -> CriterionRating;
}

pub fn judge_relevance(
    judge: &dyn RelevanceJudge,
    candidate: &CandidatePaper,
    criteria: &[RelevanceCriterion],
) -> RelevanceVerdict {
    let ratings: Vec<(String, CriterionRating)> = criteria
        .iter()
        .map(|criterion| (criterion.description.clone(), judge.rate(candidate, criterion)))
        .collect();
    let weighted: Vec<(f64, CriterionRating)> =
        criteria.iter().zip(&ratings).map(|(c, (_, r))| (c.weight, *r)).collect();
    RelevanceVerdict { ratings, tier: combine_tier(&weighted) }
}

/// Deterministic stub judge: perfectly when all content words of the
/// criterion appear in the candidate's evidence, somewhat when at least
/// half do, not otherwise.
#[derive(Debug, Default, Clone)]
pub struct LexicalRelevanceJudge;

impl RelevanceJudge for LexicalRelevanceJudge {
    fn rate(&self, candidate: &CandidatePaper, criterion: &RelevanceCriterion) -> CriterionRating {
        let evidence = candidate.embedding_text().to_lowercase();
        let words: Vec<String> = criterion
            .description
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| t.len() > 2)
            .map(|t| t.to_lowercase())
            .collect();
        if words.is_empty() {
            return CriterionRating::Not;
        }
        let hits = words.iter().filter(|w| evidence.contains(w.as_str())).count();
        if hits == words.len() {
            CriterionRating::Perfectly
        } else if hits * 2 >= words.len() {
            CriterionRating::Somewhat
        } else {
            CriterionRating::Not
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CriterionRating::*;
    use RelevanceTier::*;

    fn tier(ratings: &[(f64, CriterionRating)]) -> RelevanceTier {
        combine_tier(ratings)
    }

    #[test]
    fn combination_table() {
        assert_eq!(tier(&[(1.0, Perfectly), (1.0, Perfectly)]), PerfectlyRelevant);
        assert_eq!(tier(&[(1.0, Perfectly), (1.0, Somewhat)]), HighlyRelevant);
        assert_eq!(tier(&[(1.0, Perfectly), (3.0, Somewhat)]), SomewhatRelevant);
        assert_eq!(tier(&[(1.0, Somewhat), (1.0, Somewhat)]), SomewhatRelevant);
        assert_eq!(tier(&[(1.0, Perfectly), (1.0, Not)]), SomewhatRelevant);
        assert_eq!(tier(&[(1.0, Not), (1.0, Not)]), NotRelevant);
        assert_eq!(tier(&[]), NotRelevant);
    }
}

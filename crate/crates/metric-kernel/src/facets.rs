//! Facet combinators for judged long-form answers: the four-facet QA score,
//! table entailment recall, hypothesis matching, and end-to-end rubric
//! combination.

use serde::{Deserialize, Serialize};

use crate::MetricError;

/// How well a claim is supported by the combination of its citations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimRecallGrade {
    /// Fully supported and at least one supporting quote present: 1.0.
    FullWithQuote,
    /// Support assessed from cited titles only, no quotes: 0.5.
    TitleOnly,
    /// Not supported: 0.
    Unsupported,
}

impl ClaimRecallGrade {
    fn value(self) -> f64 {
        match self {
            ClaimRecallGrade::FullWithQuote => 1.0,
            ClaimRecallGrade::TitleOnly => 0.5,
            ClaimRecallGrade::Unsupported => 0.0,
        }
    }
}

/// Whether a single citation gives at least partial support to its claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitationGrade {
    /// At least partial support with a quote: 1.
    SupportWithQuote,
    /// At least partial support but no quote: 0.5.
    SupportNoQuote,
    /// No support: 0.
    NoSupport,
}

impl CitationGrade {
    fn value(self) -> f64 {
        match self {
            CitationGrade::SupportWithQuote => 1.0,
            CitationGrade::SupportNoQuote => 0.5,
            CitationGrade::NoSupport => 0.0,
        }
    }
}

/// Judged evidence for one claim of an answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimJudgment {
    pub recall: ClaimRecallGrade,
    pub citations: Vec<CitationGrade>,
}

/// Importance of a rubric ingredient; determines its coverage weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Importance {
    /// Must-have for answering the question; weight 2.
    AnswerCritical,
    /// Nice to have; weight 1.
    Valuable,
}

impl Importance {
    pub fn weight(self) -> f64 {
        match self {
            Importance::AnswerCritical => 2.0,
            Importance::Valuable => 1.0,
        }
    }
}

/// One judged rubric ingredient: score 0 (missing), 1 (somewhat met), or
/// 2 (perfectly met).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageItem {
    pub importance: Importance,
    pub score: u8,
}

/// The four long-form QA facets plus their mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FacetScores {
    pub citation_recall: f64,
    pub citation_precision: f64,
    pub answer_relevance: f64,
    pub answer_coverage: f64,
    pub final_score: f64,
}

impl FacetScores {
    pub fn from_facets(
        citation_recall: f64,
        citation_precision: f64,
        answer_relevance: f64,
        answer_coverage: f64,
    ) -> Self {
        let final_score =
            (citation_recall + citation_precision + answer_relevance + answer_coverage) / 4.0;
        FacetScores {
            citation_recall,
            citation_precision,
            answer_relevance,
            answer_coverage,
            final_score,
        }
    }
}

/// Combine per-claim, per-paragraph, and per-ingredient judgments into the
/// four facets.
///
/// * citation recall: mean over claims of {1.0, 0.5, 0}.
/// * citation precision: per-citation {1, 0.5, 0}, macro-averaged by claim
///   (claims without citations do not contribute).
/// * answer relevance: proportion of relevant paragraphs.
/// * answer coverage: sum w_i * (s_i / 2) / sum w_i with w = 2 for
///   answer-critical ingredients and 1 for valuable ones.
pub fn sqa_facets(
    claims: &[ClaimJudgment],
    paragraph_relevant: &[bool],
    coverage_items: &[CoverageItem],
) -> Result<FacetScores, MetricError> {
    if claims.is_empty() {
        return Err(MetricError::EmptyInput("claim judgments"));
    }
    if paragraph_relevant.is_empty() {
        return Err(MetricError::EmptyInput("paragraph judgments"));
    }
    if coverage_items.is_empty() {
        return Err(MetricError::EmptyInput("coverage items"));
    }
    if coverage_items.iter().any(|item| item.score > 2) {
        return Err(MetricError::OutOfRange("coverage item score must be 0..=2"));
    }

    let recall =
        claims.iter().map(|c| c.recall.value()).sum::<f64>() / claims.len() as f64;

    let per_claim_precisions: Vec<f64> = claims
        .iter()
        .filter(|c| !c.citations.is_empty())
        .map(|c| {
            c.citations.iter().map(|g| g.value()).sum::<f64>() / c.citations.len() as f64
        })
        .collect();
    let precision = if per_claim_precisions.is_empty() {
        0.0
    } else {
        per_claim_precisions.iter().sum::<f64>() / per_claim_precisions.len() as f64
    };

    let relevance = paragraph_relevant.iter().filter(|r| **r).count() as f64
        / paragraph_relevant.len() as f64;

    let weight_sum: f64 = coverage_items.iter().map(|i| i.importance.weight()).sum();
    let weighted: f64 = coverage_items
        .iter()
        .map(|i| i.importance.weight() * (i.score as f64 / 2.0))
        .sum();
    let coverage = weighted / weight_sum;

    Ok(FacetScores::from_facets(recall, precision, relevance, coverage))
}

/// Proportion of ground-truth statements entailed by the unrolled table.
pub fn table_recall(entailed: &[bool]) -> Result<f64, MetricError> {
    if entailed.is_empty() {
        return Err(MetricError::EmptyInput("entailment verdicts"));
    }
    Ok(entailed.iter().filter(|e| **e).count() as f64 / entailed.len() as f64)
}

/// Hypothesis Matching Score: the product of the judged alignment scores
/// for context, variables, and relationship, each in [0,1].
pub fn hypothesis_matching_score(
    context: f64,
    variables: f64,
    relationship: f64,
) -> Result<f64, MetricError> {
    for v in [context, variables, relationship] {
        if !(0.0..=1.0).contains(&v) {
            return Err(MetricError::OutOfRange("hypothesis facet must be in [0,1]"));
        }
    }
    Ok(context * variables * relationship)
}

/// Judge verdicts for one rubric item against the three artifact classes
/// of an end-to-end research run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricItemVerdicts {
    pub report: bool,
    pub code: bool,
    pub artifacts: bool,
}

impl RubricItemVerdicts {
    /// Evidence-gated item score. The combination table:
    ///
    /// | report | code | artifacts | score |
    /// |--------|------|-----------|-------|
    /// | yes    | yes  | yes       | 1     |
    /// | yes    | yes  | no        | 2/3   |
    /// | yes    | no   | yes       | 2/3   |
    /// | yes    | no   | no        | 0     |
    /// | no     | any  | any       | 0     |
    ///
    /// A report claim counts only when code or artifacts corroborate it;
    /// the score is then the mean of the three verdicts.
    pub fn score(self) -> f64 {
        if !self.report || !(self.code || self.artifacts) {
            return 0.0;
        }
        let supported =
            self.report as u8 as f64 + self.code as u8 as f64 + self.artifacts as u8 as f64;
        supported / 3.0
    }
}

/// Overall end-to-end rubric score: mean of evidence-gated item scores.
pub fn e2e_rubric_score(items: &[RubricItemVerdicts]) -> Result<f64, MetricError> {
    if items.is_empty() {
        return Err(MetricError::EmptyInput("rubric items"));
    }
    Ok(items.iter().map(|i| i.score()).sum::<f64>() / items.len() as f64)
}

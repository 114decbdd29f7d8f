//! Deterministic scoring mathematics for agent benchmark suites.
//!
//! Everything in this crate is a pure function over immutable inputs:
//! retrieval metrics (F1, nDCG, recall variants), facet combinators for
//! long-form QA scoring, macro-aggregation with confidence intervals, and
//! Pareto frontier computation for score-vs-cost reporting.

pub mod aggregate;
pub mod facets;
pub mod pareto;
pub mod retrieval;

pub use aggregate::{confidence_interval, macro_aggregate, BenchmarkStat, MacroAggregate};
pub use facets::{
    e2e_rubric_score, hypothesis_matching_score, sqa_facets, table_recall, CitationGrade,
    ClaimJudgment, ClaimRecallGrade, CoverageItem, FacetScores, Importance, RubricItemVerdicts,
};
pub use pareto::{pareto_frontier, pareto_frontier_indices, ScoreCost};
pub use retrieval::{
    estimated_recall_at_k, estimated_set_size, f1_result_set, harmonic_mean, mc_accuracy, ndcg,
    paperfinding_suite_score, recall_at_n, JudgedRanking, QueryKind,
};

/// Errors from metric computation over degenerate inputs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("length mismatch: {0}")]
    LengthMismatch(&'static str),
    #[error("value out of range: {0}")]
    OutOfRange(&'static str),
    #[error("non-positive weight for benchmark {0}")]
    NonPositiveWeight(String),
}

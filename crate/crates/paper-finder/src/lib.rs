//! Literature-search pipeline: analyze a query, route it to navigational,
//! semantic, or metadata workflows, iteratively retrieve and judge papers,
//! and rank the results with their evidence attached.

pub mod candidate;
pub mod metadata;
pub mod pipeline;
pub mod query;
pub mod rank;
pub mod relevance;
pub mod search;

pub use candidate::{cosine_distance, CandidatePaper, Embedder, HashedBagOfWords, HASHED_BOW_DIMS};
pub use metadata::{run_metadata_plan, MetadataError};
pub use pipeline::{find_papers, FinderDeps, FinderError};
pub use query::{
    plan_execution, AnalyzedQuery, ConstraintTree, MetadataFilters, Modifier, QueryAnalyzer,
    QueryError, RelevanceCriterion, RuleAnalyzer, Workflow,
};
pub use rank::{rank_results, RankableResult, RankedResult, CITATION_WEIGHT, RECENCY_WEIGHT};
pub use relevance::{
    combine_tier, judge_relevance, CriterionRating, LexicalRelevanceJudge, RelevanceJudge,
    RelevanceTier, RelevanceVerdict,
};
pub use search::{
    bandit_next_source, find_navigational, formulate_followups, semantic_round, should_stop,
    snowball, BudgetError, FinderState, FollowupComposer, NoSuggestions, Rephraser,
    RotationRephraser, SearchBudget, SemanticRoundOutcome, SourceStats, StopDecision, StopReason,
    TitleConcatComposer, TitleSuggester,
};

//! Full pipeline orchestration: analyze, route, retrieve/judge in rounds,
//! snowball, follow up, and rank.

use std::collections::BTreeMap;

use corpus_engine::{Corpus, DateCutoff, PaperRecord};

use crate::candidate::{CandidatePaper, Embedder, HashedBagOfWords};
use crate::metadata::{run_metadata_plan, MetadataError};
use crate::query::{
    plan_execution, AnalyzedQuery, ConstraintTree, MetadataFilters, QueryAnalyzer, QueryError,
    RuleAnalyzer, Workflow,
};
use crate::rank::{rank_results, RankableResult, RankedResult};
use crate::relevance::{
    judge_relevance, LexicalRelevanceJudge, RelevanceJudge, RelevanceTier, RelevanceVerdict,
};
use crate::search::{
    find_navigational, formulate_followups, semantic_round, should_stop, snowball, BudgetError,
    FinderState, FollowupComposer, NoSuggestions, Rephraser, RotationRephraser, SearchBudget,
    StopDecision, TitleConcatComposer, TitleSuggester,
};

#[derive(Debug, thiserror::Error)]
pub enum FinderError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Metadata(#[from] MetadataError),
}

/// The pluggable pieces of the pipeline; defaults are the deterministic
/// stubs used in tests.
pub struct FinderDeps {
    pub analyzer: Box<dyn QueryAnalyzer>,
    pub suggester: Box<dyn TitleSuggester>,
    pub rephraser: Box<dyn Rephraser>,
    pub judge: Box<dyn RelevanceJudge>,
    pub embedder: Box<dyn Embedder>,
    pub composer: Box<dyn FollowupComposer>,
}

impl Default for FinderDeps {
    fn default() -> Self {
        FinderDeps {
            analyzer: Box::new(RuleAnalyzer),
            suggester: Box::new(NoSuggestions),
            rephraser: Box::new(RotationRephraser),
            judge: Box::new(LexicalRelevanceJudge),
            embedder: Box::new(HashedBagOfWords),
            composer: Box::new(TitleConcatComposer),
        }
    }
}

const FOLLOWUPS_PER_ROUND: usize = 2;

fn matches_filters(record: &PaperRecord, filters: &MetadataFilters) -> bool {
    if let Some(min) = filters.year_min {
        if !record.year.is_some_and(|y| y >= min) {
            return false;
        }
    }
    if let Some(max) = filters.year_max {
        if !record.year.is_some_and(|y| y <= max) {
            return false;
        }
    }
    if let Some(min) = filters.citations_min {
        if record.citation_count < min {
            return false;
        }
    }
    if let Some(max) = filters.citations_max {
        if record.citation_count > max {
            return false;
        }
    }
    for author in &filters.authors {
        let needle = author.to_lowercase();
        if !record.authors.iter().any(|a| a.name.to_lowercase().contains(&needle)) {
            return false;
        }
    }
    for venue in &filters.venues {
        if !record.venue.eq_ignore_ascii_case(venue) {
            return false;
        }
    }
    true
}

fn filters_as_tree(filters: &MetadataFilters) -> ConstraintTree {
    let mut children = Vec::new();
    if let Some(y) = filters.year_min {
        children.push(ConstraintTree::YearAtLeast(y));
    }
    if let Some(y) = filters.year_max {
        children.push(ConstraintTree::YearAtMost(y));
    }
    if let Some(c) = filters.citations_min {
        children.push(ConstraintTree::CitationsAtLeast(c));
    }
    if let Some(c) = filters.citations_max {
        children.push(ConstraintTree::CitationsAtMost(c));
    }
    children.extend(filters.authors.iter().cloned().map(ConstraintTree::Author));
    children.extend(filters.venues.iter().cloned().map(ConstraintTree::Venue));
    ConstraintTree::And(children)
}

fn rankable(
    corpus: &Corpus,
    candidate: &CandidatePaper,
    tier: RelevanceTier,
) -> RankableResult {
    let record = corpus.record(&candidate.corpus_id);
    RankableResult {
        corpus_id: candidate.corpus_id.clone(),
        tier,
        citation_count: record.map(|r| r.citation_count).unwrap_or(0),
        publication_date: record.and_then(|r| r.publication_date),
        evidence: candidate.evidence_texts(),
    }
}

/// Judges a batch of new candidates, updating seen/judged sets and
/// per-source bandit statistics, while honoring the judgment budget.
fn judge_batch(
    state: &mut FinderState,
    all: &mut BTreeMap<String, CandidatePaper>,
    batch: Vec<CandidatePaper>,
    q: &AnalyzedQuery,
    deps: &FinderDeps,
    budget: &SearchBudget,
) {
    for candidate in batch.into_iter().take(budget.m) {
        if state.seen.contains(&candidate.corpus_id) {
            continue;
        }
        state.seen.insert(candidate.corpus_id.clone());
        if state.judgment_calls >= budget.judgment_budget {
            all.insert(candidate.corpus_id.clone(), candidate);
            continue;
        }
        state.judgment_calls += 1;
        let verdict: RelevanceVerdict =
            judge_relevance(deps.judge.as_ref(), &candidate, &q.relevance_criteria);
        let success = verdict.tier > RelevanceTier::NotRelevant;
        for source in &candidate.sources {
            let stats = state.sources.entry(source.clone()).or_default();
            stats.pulls += 1;
            if success {
                stats.successes += 1;
            }
        }
        state.judged.insert(candidate.corpus_id.clone(), verdict);
        all.insert(candidate.corpus_id.clone(), candidate);
    }
}

pub fn find_papers(
    query_text: &str,
    corpus: &Corpus,
    deps: &FinderDeps,
    budget: &SearchBudget,
    cutoff: Option<DateCutoff>,
) -> Result<Vec<RankedResult>, FinderError> {
    budget.validate()?;
    let q = deps.analyzer.analyze(query_text)?;

    match plan_execution(&q) {
        Workflow::Navigational => {
            // Title-level matches are definitive; candidates surfaced only
            // through citation tallies rank a step below.
            let candidates = find_navigational(&q, corpus, deps.suggester.as_ref(), cutoff);
            let rankables: Vec<RankableResult> = candidates
                .iter()
                .map(|c| {
                    let tier = if c.sources.iter().any(|s| s.starts_with("nav:title"))
                        || c.sources.iter().any(|s| s.starts_with("nav:suggestion"))
                    {
                        RelevanceTier::PerfectlyRelevant
                    } else {
                        RelevanceTier::HighlyRelevant
                    };
                    rankable(corpus, c, tier)
                })
                .collect();
            Ok(rank_results(&rankables, &q.modifiers))
        }
        Workflow::Metadata => {
            let tree = q
                .constraint_tree
                .clone()
                .unwrap_or_else(|| filters_as_tree(&q.metadata));
            let ids = run_metadata_plan(corpus, &tree)?;
            let rankables: Vec<RankableResult> = ids
                .into_iter()
                .filter_map(|id| corpus.record(&id).cloned())
                .filter(|record| corpus_engine::passes_cutoff(record, cutoff))
                .map(|record| {
                    let mut candidate = CandidatePaper::new(&record.corpus_id);
                    candidate.title = record.title.clone();
                    candidate.abstract_text = record.abstract_text.clone();
                    candidate.sources.insert("metadata".into());
                    rankable(corpus, &candidate, RelevanceTier::PerfectlyRelevant)
                })
                .collect();
            Ok(rank_results(&rankables, &q.modifiers))
        }
        Workflow::Semantic { post_filter } => {
            let mut state = FinderState::default();
            let mut all: BTreeMap<String, CandidatePaper> = BTreeMap::new();
            let mut round_queries = vec![q.semantic_criteria.clone()];

            loop {
                for query in &round_queries {
                    let outcome = semantic_round(
                        &state,
                        query,
                        budget,
                        corpus,
                        deps.rephraser.as_ref(),
                        cutoff,
                    );
                    judge_batch(&mut state, &mut all, outcome.candidates, &q, deps, budget);
                }
                let expansion = snowball(corpus, &state, cutoff);
                judge_batch(&mut state, &mut all, expansion, &q, deps, budget);
                state.rounds_completed += 1;

                if let StopDecision::Stop(_) = should_stop(&state, budget) {
                    break;
                }
                round_queries = formulate_followups(
                    deps.embedder.as_ref(),
                    deps.composer.as_ref(),
                    &state,
                    &all,
                    &q.semantic_criteria,
                    FOLLOWUPS_PER_ROUND,
                );
                if round_queries.is_empty() {
                    break;
                }
            }

            let rankables: Vec<RankableResult> = state
                .judged
                .iter()
                .filter(|(_, v)| v.tier > RelevanceTier::NotRelevant)
                .filter_map(|(id, v)| all.get(id).map(|c| (c, v.tier)))
                .filter(|(c, _)| {
                    !post_filter
                        || corpus
                            .record(&c.corpus_id)
                            .is_some_and(|r| matches_filters(r, &q.metadata))
                })
                .map(|(c, tier)| rankable(corpus, c, tier))
                .collect();
            Ok(rank_results(&rankables, &q.modifiers))
        }
    }
}

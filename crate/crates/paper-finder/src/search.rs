//! Retrieval strategies, the source bandit, snowballing, follow-up
//! formulation, and the stopping rule.

use std::collections::{BTreeMap, BTreeSet};

use corpus_engine::{Corpus, DateCutoff, Direction, PaperRecord, Snippet};
use serde::{Deserialize, Serialize};

use crate::candidate::{cosine_distance, CandidatePaper, Embedder};
use crate::query::AnalyzedQuery;
use crate::relevance::{RelevanceTier, RelevanceVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Rephrasings issued per semantic round, on top of the original query.
    pub k: usize,
    /// Papers kept for judgment per pass.
    pub m: usize,
    pub max_rounds: usize,
    pub judgment_budget: usize,
    pub highly_relevant_target: usize,
    /// Estimated-set expansion factor, within [2, 10].
    pub estimated_set_factor: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            k: 3,
            m: 50,
            max_rounds: 4,
            judgment_budget: 300,
            highly_relevant_target: 15,
            estimated_set_factor: 5.0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BudgetError {
    #[error("budget fields must be positive")]
    NonPositive,
    #[error("estimated-set factor {0} outside [2, 10]")]
    FactorOutOfRange(f64),
}

impl SearchBudget {
    pub fn validate(&self) -> Result<(), BudgetError> {
        if self.k == 0
            || self.m == 0
            || self.max_rounds == 0
            || self.judgment_budget == 0
            || self.highly_relevant_target == 0
        {
            return Err(BudgetError::NonPositive);
        }
        if !(2.0..=10.0).contains(&self.estimated_set_factor) {
            return Err(BudgetError::FactorOutOfRange(self.estimated_set_factor));
        }
        Ok(())
    }
}

/// Mutable search state across rounds.
#[derive(Debug, Default, Clone)]
pub struct FinderState {
    pub seen: BTreeSet<String>,
    pub judged: BTreeMap<String, RelevanceVerdict>,
    pub judgment_calls: usize,
    pub rounds_completed: usize,
    pub sources: BTreeMap<String, SourceStats>,
}

impl FinderState {
    pub fn tier_count(&self, minimum: RelevanceTier) -> usize {
        self.judged.values().filter(|v| v.tier >= minimum).count()
    }
}

// ---- navigational ----

/// Title suggestions from a model, grounded by title search before use.
pub trait TitleSuggester: Send + Sync {
    fn suggest_titles(&self, query: &str) -> Vec<String>;
}

/// Suggests nothing; strategy 2 contributes only when a model is wired in.
#[derive(Debug, Default, Clone)]
pub struct NoSuggestions;

impl TitleSuggester for NoSuggestions {
    fn suggest_titles(&self, _: &str) -> Vec<String> {
        vec![]
    }
}

fn filled_candidate(record: &PaperRecord, source: &str) -> CandidatePaper {
    let mut candidate = CandidatePaper::new(&record.corpus_id);
    candidate.title = record.title.clone();
    candidate.abstract_text = record.abstract_text.clone();
    candidate.sources.insert(source.to_string());
    candidate
}

fn merge_into(pool: &mut BTreeMap<String, CandidatePaper>, candidate: CandidatePaper) {
    match pool.get_mut(&candidate.corpus_id) {
        Some(existing) => {
            existing.sources.extend(candidate.sources);
            for snippet in candidate.own_snippets {
                if !existing.own_snippets.contains(&snippet) {
                    existing.own_snippets.push(snippet);
                }
            }
            for snippet in candidate.citing_snippets {
                if !existing.citing_snippets.contains(&snippet) {
                    existing.citing_snippets.push(snippet);
                }
            }
            if existing.title.is_empty() {
                existing.title = candidate.title;
            }
            if existing.abstract_text.is_empty() {
                existing.abstract_text = candidate.abstract_text;
            }
        }
        None => {
            pool.insert(candidate.corpus_id.clone(), candidate);
        }
    }
}

fn snippet_position(s: &Snippet) -> (usize, usize, usize) {
    (s.section_index, s.paragraph_index, s.span.0)
}

/// Three strategies run over the corpus and their outputs union,
/// deduplicated by corpus id:
/// 1. direct title search on the query;
/// 2. model-suggested titles, each grounded by title search;
/// 3. key-term snippet search, tallying the papers those snippets cite and
///    keeping the most-cited ones.
pub fn find_navigational(
    q: &AnalyzedQuery,
    corpus: &Corpus,
    suggester: &dyn TitleSuggester,
    cutoff: Option<DateCutoff>,
) -> Vec<CandidatePaper> {
    let mut pool: BTreeMap<String, CandidatePaper> = BTreeMap::new();
    let passes = |record: &PaperRecord| corpus_engine::passes_cutoff(record, cutoff);

    let lookup = if q.semantic_criteria.is_empty() { &q.original } else { &q.semantic_criteria };
    if let Ok(Some(hit)) = corpus.search_paper_by_title(lookup) {
        if hit.score >= corpus_engine::TITLE_CONFIDENCE_THRESHOLD && passes(&hit.record) {
            merge_into(&mut pool, filled_candidate(&hit.record, "nav:title"));
        }
    }

    for title in suggester.suggest_titles(&q.original) {
        if let Ok(Some(hit)) = corpus.search_paper_by_title(&title) {
            if hit.score >= corpus_engine::TITLE_CONFIDENCE_THRESHOLD && passes(&hit.record) {
                merge_into(&mut pool, filled_candidate(&hit.record, "nav:suggestion"));
            }
        }
    }

    if let Ok(result) = corpus.snippet_search(lookup, 20, cutoff, None) {
        let mut cited_counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut citing: BTreeMap<String, Vec<Snippet>> = BTreeMap::new();
        for snippet in &result.snippets {
            for cited in &snippet.cited_ids {
                *cited_counts.entry(cited.clone()).or_insert(0) += 1;
                citing.entry(cited.clone()).or_default().push(snippet.clone());
            }
        }
        let mut ranked: Vec<(usize, String)> =
            cited_counts.into_iter().map(|(id, n)| (n, id)).collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, id) in ranked.into_iter().take(3) {
            let Some(record) = corpus.record(&id) else { continue };
            if !passes(record) {
                continue;
            }
            let mut candidate = filled_candidate(record, "nav:cited");
            candidate.citing_snippets = citing.remove(&id).unwrap_or_default();
            merge_into(&mut pool, candidate);
        }
    }

    pool.into_values().collect()
}

// ---- semantic rounds ----

/// Produces query rephrasings; production wires a model, tests use
/// [`RotationRephraser`].
pub trait Rephraser: Send + Sync {
    fn rephrase(&self, query: &str, k: usize) -> Vec<String>;
}

/// Deterministic stub: the i-th rephrasing rotates the query's words left
/// by i positions.
#[derive(Debug, Default, Clone)]
pub struct RotationRephraser;

impl Rephraser for RotationRephraser {
    fn rephrase(&self, query: &str, k: usize) -> Vec<String> {
        let words: Vec<&str> = query.split_whitespace().collect();
        (1..=k)
            .map(|i| {
                if words.is_empty() {
                    query.to_string()
                } else {
                    let pivot = i % words.len().max(1);
                    let mut rotated = words[pivot..].to_vec();
                    rotated.extend_from_slice(&words[..pivot]);
                    rotated.join(" ")
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SemanticRoundOutcome {
    /// New candidates only: papers already seen are filtered out.
    pub candidates: Vec<CandidatePaper>,
    pub issued_queries: Vec<String>,
}

/// One retrieval pass: the query plus k rephrasings, snippets merged per
/// paper across all result sets and ordered by in-paper position, cited
/// papers added as candidates carrying the citing snippet.
pub fn semantic_round(
    state: &FinderState,
    query_text: &str,
    budget: &SearchBudget,
    corpus: &Corpus,
    rephraser: &dyn Rephraser,
    cutoff: Option<DateCutoff>,
) -> SemanticRoundOutcome {
    let mut queries = vec![query_text.to_string()];
    queries.extend(rephraser.rephrase(query_text, budget.k));

    let mut pool: BTreeMap<String, CandidatePaper> = BTreeMap::new();
    for (i, query) in queries.iter().enumerate() {
        let source = format!("semantic:{i}");
        let Ok(result) = corpus.snippet_search(query, budget.m, cutoff, None) else { continue };
        for snippet in result.snippets {
            let record = corpus.record(&snippet.paper_id).expect("snippet paper exists");
            let mut candidate = filled_candidate(record, &source);
            candidate.own_snippets.push(snippet.clone());
            merge_into(&mut pool, candidate);

            for cited in &snippet.cited_ids {
                let Some(cited_record) = corpus.record(cited) else { continue };
                if !corpus_engine::passes_cutoff(cited_record, cutoff) {
                    continue;
                }
                let mut cited_candidate = filled_candidate(cited_record, &source);
                cited_candidate.citing_snippets.push(snippet.clone());
                merge_into(&mut pool, cited_candidate);
            }
        }
    }

    let candidates = pool
        .into_values()
        .filter(|c| !state.seen.contains(&c.corpus_id))
        .map(|mut c| {
            c.own_snippets.sort_by_key(snippet_position);
            c
        })
        .collect();
    SemanticRoundOutcome { candidates, issued_queries: queries }
}

// ---- bandit ----

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceStats {
    pub pulls: u64,
    /// Judged-relevant papers contributed by this source.
    pub successes: u64,
}

/// UCB1 over sources: any unpulled source first (by id), otherwise
/// argmax of mean + sqrt(2 ln N / n).
pub fn bandit_next_source(stats: &BTreeMap<String, SourceStats>) -> Option<String> {
    if stats.is_empty() {
        return None;
    }
    if let Some((id, _)) = stats.iter().find(|(_, s)| s.pulls == 0) {
        return Some(id.clone());
    }
    let total: u64 = stats.values().map(|s| s.pulls).sum();
    let ucb = |s: &SourceStats| {
        s.successes as f64 / s.pulls as f64 + (2.0 * (total as f64).ln() / s.pulls as f64).sqrt()
    };
    stats
        .iter()
        .max_by(|a, b| ucb(a.1).partial_cmp(&ucb(b.1)).unwrap().then(b.0.cmp(a.0)))
        .map(|(id, _)| id.clone())
}

// ---- snowballing ----

/// Expands the top two relevance tiers (perfectly- and highly-relevant)
/// along citation edges in both directions; papers already seen are not
/// re-emitted and lower tiers are never expanded.
pub fn snowball(
    corpus: &Corpus,
    state: &FinderState,
    cutoff: Option<DateCutoff>,
) -> Vec<CandidatePaper> {
    let mut pool: BTreeMap<String, CandidatePaper> = BTreeMap::new();
    for (id, verdict) in &state.judged {
        if verdict.tier < RelevanceTier::HighlyRelevant {
            continue;
        }
        for direction in [Direction::Forward, Direction::Backward] {
            let Ok(neighbors) = corpus.get_citations(id, direction, cutoff) else { continue };
            for record in neighbors {
                if state.seen.contains(&record.corpus_id) {
                    continue;
                }
                merge_into(&mut pool, filled_candidate(&record, "snowball"));
            }
        }
    }
    pool.into_values().collect()
}

// ---- follow-ups ----

/// Composes a follow-up query from the original and a seed paper;
/// production wires a model, the default concatenates the seed's title.
pub trait FollowupComposer: Send + Sync {
    fn compose(&self, original: &str, seed: &CandidatePaper) -> String;
}

#[derive(Debug, Default, Clone)]
pub struct TitleConcatComposer;

impl FollowupComposer for TitleConcatComposer {
    fn compose(&self, original: &str, seed: &CandidatePaper) -> String {
        format!("{original} {}", seed.title)
    }
}

/// Picks seeds among judged-relevant candidates at maximal embedding
/// distance from the query, then composes one follow-up per seed.
pub fn formulate_followups(
    embedder: &dyn Embedder,
    composer: &dyn FollowupComposer,
    state: &FinderState,
    candidates: &BTreeMap<String, CandidatePaper>,
    query_text: &str,
    count: usize,
) -> Vec<String> {
    let query_embedding = embedder.embed(query_text);
    let mut seeds: Vec<(f64, &CandidatePaper)> = state
        .judged
        .iter()
        .filter(|(_, v)| v.tier > RelevanceTier::NotRelevant)
        .filter_map(|(id, _)| candidates.get(id))
        .map(|c| (cosine_distance(&query_embedding, &embedder.embed(&c.embedding_text())), c))
        .collect();
    seeds.sort_by(|a, b| {
        b.0.partial_cmp(&a.0).unwrap().then(a.1.corpus_id.cmp(&b.1.corpus_id))
    });
    seeds
        .into_iter()
        .take(count)
        .map(|(_, seed)| composer.compose(query_text, seed))
        .collect()
}

// ---- stopping ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    FoundEnough,
    JudgmentBudget,
    MaxRounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Continue,
    Stop(StopReason),
}

pub fn should_stop(state: &FinderState, budget: &SearchBudget) -> StopDecision {
    if state.tier_count(RelevanceTier::HighlyRelevant) >= budget.highly_relevant_target {
        return StopDecision::Stop(StopReason::FoundEnough);
    }
    if state.judgment_calls >= budget.judgment_budget {
        return StopDecision::Stop(StopReason::JudgmentBudget);
    }
    if state.rounds_completed >= budget.max_rounds {
        return StopDecision::Stop(StopReason::MaxRounds);
    }
    StopDecision::Continue
}

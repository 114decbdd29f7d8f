//! Query analysis: turning free text into a structured query object.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("query text is empty")]
    Empty,
}

/// Closed modifier vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modifier {
    Recent,
    EarlyWorks,
    Central,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceCriterion {
    pub description: String,
    pub weight: f64,
}

/// Simple metadata filters; anything needing boolean structure goes into
/// the constraint tree instead.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetadataFilters {
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub authors: Vec<String>,
    pub venues: Vec<String>,
    pub citations_min: Option<u64>,
    pub citations_max: Option<u64>,
}

impl MetadataFilters {
    pub fn is_empty(&self) -> bool {
        *self == MetadataFilters::default()
    }
}

/// Boolean constraint tree over paper metadata and citation edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintTree {
    And(Vec<ConstraintTree>),
    Or(Vec<ConstraintTree>),
    Not(Box<ConstraintTree>),
    Venue(String),
    YearAtLeast(i32),
    YearAtMost(i32),
    Author(String),
    CitationsAtLeast(u64),
    CitationsAtMost(u64),
    /// Papers that cite the given paper.
    Cites(String),
    /// Papers cited by the given paper.
    CitedBy(String),
}

impl ConstraintTree {
    /// A tree with no leaf predicate anywhere constrains nothing.
    pub fn is_vacuous(&self) -> bool {
        match self {
            ConstraintTree::And(children) | ConstraintTree::Or(children) => {
                children.iter().all(|c| c.is_vacuous())
            }
            ConstraintTree::Not(child) => child.is_vacuous(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzedQuery {
    pub original: String,
    pub navigational: bool,
    pub semantic_criteria: String,
    pub relevance_criteria: Vec<RelevanceCriterion>,
    pub metadata: MetadataFilters,
    pub constraint_tree: Option<ConstraintTree>,
    /// Constraints recognized but not executable here (e.g. affiliation).
    pub unsupported_constraints: Vec<String>,
    pub modifiers: Vec<Modifier>,
}

/// Pluggable query analyzer; production wires a model behind this, tests
/// use [`RuleAnalyzer`].
pub trait QueryAnalyzer: Send + Sync {
    fn analyze(&self, text: &str) -> Result<AnalyzedQuery, QueryError>;
}

/// Deterministic rule-based analyzer.
///
/// Rules: "the ... paper" or a quoted phrase marks a navigational lookup;
/// "recent"/"latest" and "early"/"seminal"/"foundational" set modifiers;
/// `by <Capitalized Name>` becomes an author filter; `since|after <year>`
/// and `before <year>` become year bounds; `affiliated with ...` is flagged
/// unsupported. The residual text is the semantic criterion.
#[derive(Debug, Default, Clone)]
pub struct RuleAnalyzer;

fn capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(|c| c.is_uppercase())
}

impl QueryAnalyzer for RuleAnalyzer {
    fn analyze(&self, text: &str) -> Result<AnalyzedQuery, QueryError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(QueryError::Empty);
        }
        let lower = trimmed.to_lowercase();
        let words: Vec<&str> = trimmed.split_whitespace().collect();

        let navigational = (lower.starts_with("the ") && lower.ends_with(" paper"))
            || trimmed.matches('"').count() >= 2;

        let mut modifiers = Vec::new();
        if lower.contains("recent") || lower.contains("latest") {
            modifiers.push(Modifier::Recent);
        }
        if lower.contains("early") || lower.contains("seminal") || lower.contains("foundational") {
            modifiers.push(Modifier::EarlyWorks);
        }
        if lower.contains("influential") || lower.contains("highly cited") {
            modifiers.push(Modifier::Central);
        }

        let mut metadata = MetadataFilters::default();
        let mut unsupported = Vec::new();
        let mut consumed = vec![false; words.len()];
        for (i, word) in words.iter().enumerate() {
            let key = word.to_lowercase();
            match key.as_str() {
                "by" => {
                    // `by Jane Doe` — take the following capitalized run.
                    let mut name = Vec::new();
                    for (j, next) in words.iter().enumerate().skip(i + 1) {
                        let clean = next.trim_matches(|c: char| !c.is_alphanumeric());
                        if capitalized(clean) && !clean.is_empty() {
                            name.push(clean.to_string());
                            consumed[j] = true;
                        } else {
                            break;
                        }
                    }
                    if !name.is_empty() {
                        consumed[i] = true;
                        metadata.authors.push(name.join(" "));
                    }
                }
                "since" | "after" => {
                    if let Some(year) = words.get(i + 1).and_then(|w| {
                        w.trim_matches(|c: char| !c.is_numeric()).parse::<i32>().ok()
                    }) {
                        metadata.year_min = Some(year);
                        consumed[i] = true;
                        consumed[i + 1] = true;
                    }
                }
                "before" => {
                    if let Some(year) = words.get(i + 1).and_then(|w| {
                        w.trim_matches(|c: char| !c.is_numeric()).parse::<i32>().ok()
                    }) {
                        metadata.year_max = Some(year - 1);
                        consumed[i] = true;
                        consumed[i + 1] = true;
                    }
                }
                "affiliated" => {
                    unsupported.push("affiliation".to_string());
                }
                _ => {}
            }
        }

        // Modifier markers and request filler drop out of the semantic
        // criterion; what remains is the topic itself.
        const FILLER: &[&str] = &[
            "recent", "latest", "early", "seminal", "foundational", "influential", "papers",
            "paper", "works", "find", "show", "me",
        ];
        let semantic_criteria = words
            .iter()
            .enumerate()
            .filter(|(i, word)| {
                !consumed[*i] && (navigational || !FILLER.contains(&word.to_lowercase().as_str()))
            })
            .map(|(_, w)| *w)
            .collect::<Vec<_>>()
            .join(" ");

        let relevance_criteria = if navigational {
            vec![]
        } else {
            vec![RelevanceCriterion { description: semantic_criteria.clone(), weight: 1.0 }]
        };

        Ok(AnalyzedQuery {
            original: trimmed.to_string(),
            navigational,
            semantic_criteria,
            relevance_criteria,
            metadata,
            constraint_tree: None,
            unsupported_constraints: unsupported,
            modifiers,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Workflow {
    Navigational,
    Semantic { post_filter: bool },
    Metadata,
}

/// Routes the analyzed query to a workflow: navigational lookups first,
/// purely-metadata queries to the plan executor, everything else to the
/// semantic loop (with metadata applied as a post-filter when present).
pub fn plan_execution(q: &AnalyzedQuery) -> Workflow {
    if q.navigational {
        return Workflow::Navigational;
    }
    let has_metadata = !q.metadata.is_empty() || q.constraint_tree.is_some();
    let semantic_empty = q.semantic_criteria.trim().is_empty()
        || q.relevance_criteria.iter().all(|c| c.description.trim().is_empty());
    if has_metadata && semantic_empty {
        return Workflow::Metadata;
    }
    Workflow::Semantic { post_filter: has_metadata }
}

//! Constraint-tree execution against the corpus.

use std::collections::BTreeSet;

use corpus_engine::{resolve_id_form, Corpus, PaperRecord};

use crate::query::ConstraintTree;

#[derive(Debug, thiserror::Error)]
pub enum MetadataError {
    #[error("constraint tree has no predicates")]
    VacuousPlan,
}

fn satisfies(corpus: &Corpus, record: &PaperRecord, tree: &ConstraintTree) -> bool {
    match tree {
        ConstraintTree::And(children) => children.iter().all(|c| satisfies(corpus, record, c)),
        ConstraintTree::Or(children) => children.iter().any(|c| satisfies(corpus, record, c)),
        ConstraintTree::Not(child) => !satisfies(corpus, record, child),
        ConstraintTree::Venue(venue) => record.venue.eq_ignore_ascii_case(venue),
        ConstraintTree::YearAtLeast(year) => record.year.is_some_and(|y| y >= *year),
        ConstraintTree::YearAtMost(year) => record.year.is_some_and(|y| y <= *year),
        ConstraintTree::Author(name) => {
            let needle = name.to_lowercase();
            record.authors.iter().any(|a| a.name.to_lowercase().contains(&needle))
        }
        ConstraintTree::CitationsAtLeast(n) => record.citation_count >= *n,
        ConstraintTree::CitationsAtMost(n) => record.citation_count <= *n,
        ConstraintTree::Cites(target) => {
            let target = resolve_id_form(target);
            record.references.iter().any(|r| resolve_id_form(r) == target)
        }
        ConstraintTree::CitedBy(target) => corpus
            .record(target)
            .is_some_and(|t| t.references.iter().any(|r| resolve_id_form(r) == record.corpus_id)),
    }
}

/// Evaluates the tree over every corpus paper and returns the satisfying
/// id set. Semantically a series of metadata lookups; evaluated here as one
/// scan since the corpus is local.
pub fn run_metadata_plan(
    corpus: &Corpus,
    plan: &ConstraintTree,
) -> Result<BTreeSet<String>, MetadataError> {
    if plan.is_vacuous() {
        return Err(MetadataError::VacuousPlan);
    }
    Ok(corpus
        .paper_ids()
        .filter(|id| satisfies(corpus, corpus.record(id).expect("listed id exists"), plan))
        .map(String::from)
        .collect())
}

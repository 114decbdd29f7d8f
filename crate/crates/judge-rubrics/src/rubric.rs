//! Ingredient candidates, clustering into a rubric, and the rubric file
//! format (one cluster per record).

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Importance {
    Valuable,
    AnswerCritical,
}

impl Importance {
    pub fn weight(self) -> u32 {
        match self {
            Importance::AnswerCritical => 2,
            Importance::Valuable => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngredientCandidate {
    pub statement: String,
    pub importance: Importance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricIngredient {
    pub cluster_id: String,
    pub statement: String,
    pub importance: Importance,
    /// Indices of the source answers that contributed a member.
    pub provenance: Vec<usize>,
}

fn normalize_statement(text: &str) -> String {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Groups candidates from several systems' answers into clusters of
/// equivalent statements (normalized text match). Cluster importance is the
/// maximum over members; the statement of the first member read becomes the
/// cluster statement; cluster order follows first appearance.
pub fn cluster_ingredients(pools: &[Vec<IngredientCandidate>]) -> Vec<RubricIngredient> {
    let mut order: Vec<String> = Vec::new();
    let mut clusters: BTreeMap<String, RubricIngredient> = BTreeMap::new();
    for (source, pool) in pools.iter().enumerate() {
        for candidate in pool {
            let key = normalize_statement(&candidate.statement);
            match clusters.get_mut(&key) {
                Some(cluster) => {
                    cluster.importance = cluster.importance.max(candidate.importance);
                    if !cluster.provenance.contains(&source) {
                        cluster.provenance.push(source);
                    }
                }
                None => {
                    order.push(key.clone());
                    clusters.insert(
                        key,
                        RubricIngredient {
                            cluster_id: String::new(),
                            statement: candidate.statement.clone(),
                            importance: candidate.importance,
                            provenance: vec![source],
                        },
                    );
                }
            }
        }
    }
    order
        .into_iter()
        .enumerate()
        .map(|(i, key)| {
            let mut cluster = clusters.remove(&key).expect("cluster exists");
            cluster.cluster_id = format!("ing-{:03}", i + 1);
            cluster
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum RubricFileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("record {line}: {source}")]
    Malformed { line: usize, source: serde_json::Error },
}

pub fn write_rubric_file(path: &std::path::Path, rubric: &[RubricIngredient]) -> Result<(), RubricFileError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for ingredient in rubric {
        serde_json::to_writer(&mut file, ingredient).expect("ingredient serializes");
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

pub fn read_rubric_file(path: &std::path::Path) -> Result<Vec<RubricIngredient>, RubricFileError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut rubric = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rubric.push(
            serde_json::from_str(&line)
                .map_err(|source| RubricFileError::Malformed { line: i + 1, source })?,
        );
    }
    Ok(rubric)
}

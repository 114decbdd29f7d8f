//! Append-only submission store: a directory of entry files plus an index.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use suite_runner::ScoreReport;
use thiserror::Error;

use crate::entry::{classify_submission, SubmissionMeta, TagError};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed {what}: {message}")]
    Malformed { what: &'static str, message: String },
}

/// Why a submission was not accepted. Rejections are expected outcomes,
/// distinct from store failures.
#[derive(Debug, Error, PartialEq)]
pub enum Rejection {
    #[error("{0}")]
    InvalidTags(#[from] TagError),
    #[error("report digest mismatch: declared {declared}, computed {computed}")]
    DigestMismatch { declared: String, computed: String },
    #[error("duplicate submission: agent `{agent}` already has report {digest}")]
    Duplicate { agent: String, digest: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredEntry {
    pub meta: SubmissionMeta,
    pub report: ScoreReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct IndexRow {
    agent: String,
    report_digest: String,
    file: String,
}

pub struct Store {
    dir: PathBuf,
    index: Vec<IndexRow>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect()
}

impl Store {
    /// Open (or create) a store rooted at `dir`.
    pub fn open(dir: &Path) -> Result<Store, StoreError> {
        std::fs::create_dir_all(dir.join("entries"))?;
        let index_path = dir.join("index.json");
        let index = if index_path.exists() {
            let text = std::fs::read_to_string(&index_path)?;
            serde_json::from_str(&text).map_err(|e| StoreError::Malformed {
                what: "index",
                message: e.to_string(),
            })?
        } else {
            Vec::new()
        };
        Ok(Store { dir: dir.to_path_buf(), index })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Validate and append one submission. `Ok(Err(_))` is a rejected
    /// submission; `Err(_)` is a store failure.
    pub fn submit(
        &mut self,
        meta: &SubmissionMeta,
        report_bytes: &[u8],
    ) -> Result<Result<(), Rejection>, StoreError> {
        if let Err(e) = classify_submission(meta) {
            return Ok(Err(Rejection::InvalidTags(e)));
        }
        let computed = sha256_hex(report_bytes);
        if computed != meta.report_digest {
            return Ok(Err(Rejection::DigestMismatch {
                declared: meta.report_digest.clone(),
                computed,
            }));
        }
        if self
            .index
            .iter()
            .any(|row| row.agent == meta.agent && row.report_digest == computed)
        {
            return Ok(Err(Rejection::Duplicate { agent: meta.agent.clone(), digest: computed }));
        }
        let report: ScoreReport =
            serde_json::from_slice(report_bytes).map_err(|e| StoreError::Malformed {
                what: "report",
                message: e.to_string(),
            })?;

        let file = format!("entries/{}-{}.json", sanitize(&meta.agent), &computed[..12]);
        let entry = StoredEntry { meta: meta.clone(), report };
        std::fs::write(self.dir.join(&file), serde_json::to_vec_pretty(&entry).unwrap())?;
        self.index.push(IndexRow {
            agent: meta.agent.clone(),
            report_digest: computed,
            file,
        });
        std::fs::write(self.dir.join("index.json"), serde_json::to_vec_pretty(&self.index).unwrap())?;
        Ok(Ok(()))
    }

    /// All entries, sorted by (agent, report digest) so downstream renders
    /// are independent of submission order.
    pub fn entries(&self) -> Result<Vec<StoredEntry>, StoreError> {
        let mut rows = self.index.clone();
        rows.sort_by(|a, b| (&a.agent, &a.report_digest).cmp(&(&b.agent, &b.report_digest)));
        let mut entries = Vec::with_capacity(rows.len());
        for row in rows {
            let text = std::fs::read_to_string(self.dir.join(&row.file))?;
            let entry: StoredEntry = serde_json::from_str(&text).map_err(|e| StoreError::Malformed {
                what: "entry",
                message: e.to_string(),
            })?;
            entries.push(entry);
        }
        Ok(entries)
    }
}

/// Read a bundle directory holding `meta.json` + `report.json`.
pub fn read_bundle(dir: &Path) -> Result<(SubmissionMeta, Vec<u8>), StoreError> {
    let meta_text = std::fs::read_to_string(dir.join("meta.json"))?;
    let meta: SubmissionMeta = serde_json::from_str(&meta_text).map_err(|e| StoreError::Malformed {
        what: "meta",
        message: e.to_string(),
    })?;
    let report_bytes = std::fs::read(dir.join("report.json"))?;
    Ok((meta, report_bytes))
}

//! Suite manifests: which benchmarks to run, with which tools, cutoffs,
//! metrics, and weights.

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use corpus_engine::DateCutoff;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("suite has no benchmarks")]
    EmptySuite,
    #[error("benchmark `{benchmark}`: unknown metric `{metric}`")]
    UnknownMetric { benchmark: String, metric: String },
    #[error("benchmark `{0}`: weight must be positive")]
    NonPositiveWeight(String),
    #[error("duplicate benchmark id `{0}`")]
    DuplicateBenchmark(String),
    #[error("task file {path}: {message}")]
    TaskFile { path: PathBuf, message: String },
}

/// How per-task answers are turned into scores in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    /// Gold is a string; exact match after trimming, case-insensitive.
    McAccuracy,
    /// Gold is a set of ids; the answer is parsed as a delimited id list.
    ResultSetF1,
    /// Gold is `{relevant: [ids], n}`; the answer is a ranked id list.
    RecallAtN,
    /// Gold is a list of rubric items; scored by a judge at report time.
    RubricItems,
}

impl MetricId {
    pub fn parse(text: &str) -> Option<MetricId> {
        match text {
            "mc_accuracy" => Some(MetricId::McAccuracy),
            "result_set_f1" => Some(MetricId::ResultSetF1),
            "recall_at_n" => Some(MetricId::RecallAtN),
            "rubric_items" => Some(MetricId::RubricItems),
            _ => None,
        }
    }

    /// Metrics scored by an LLM judge are deferred to `score_run`; the
    /// run log records the answer without a score.
    pub fn needs_judge(self) -> bool {
        matches!(self, MetricId::RubricItems)
    }
}

/// Which tools a benchmark's agent may reach, and how the corpus is frozen
/// for it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ToolPolicy {
    #[serde(default)]
    pub allowed_tools: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<DateCutoff>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paper_ids: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_prompt: Option<String>,
    #[serde(default)]
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub input: String,
    pub gold: serde_json::Value,
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub id: String,
    pub category: String,
    pub metric: MetricId,
    /// Macro weight within the category; paired evals carry 0.5 each.
    pub weight: f64,
    pub tools: ToolPolicy,
    pub judge: Option<JudgeSettings>,
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunLimits {
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default = "default_timeout_secs")]
    pub task_timeout_secs: u64,
}

fn default_parallelism() -> usize {
    4
}

fn default_timeout_secs() -> u64 {
    30 * 60
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits { parallelism: default_parallelism(), task_timeout_secs: default_timeout_secs() }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteManifest {
    pub benchmarks: Vec<Benchmark>,
    pub limits: RunLimits,
    /// sha256 of the manifest file bytes; run logs carry it so a report can
    /// be tied back to the exact suite it was produced from.
    pub digest: String,
}

// On-disk shape. Task files are JSON lines, one task per line, resolved
// relative to the manifest's directory.
#[derive(Deserialize)]
struct ManifestFile {
    #[serde(default)]
    limits: Option<RunLimits>,
    #[serde(default)]
    benchmarks: Vec<BenchmarkEntry>,
}

#[derive(Deserialize)]
struct BenchmarkEntry {
    id: String,
    category: String,
    task_file: PathBuf,
    metric: String,
    #[serde(default = "default_weight")]
    weight: f64,
    #[serde(default)]
    tools: ToolPolicy,
    #[serde(default)]
    judge: Option<JudgeSettings>,
}

fn default_weight() -> f64 {
    1.0
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_suite(path: &Path) -> Result<SuiteManifest, SuiteError> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let file: ManifestFile = toml::from_str(&text)?;
    if file.benchmarks.is_empty() {
        return Err(SuiteError::EmptySuite);
    }

    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut seen = HashSet::new();
    let mut benchmarks = Vec::with_capacity(file.benchmarks.len());
    for entry in file.benchmarks {
        if !seen.insert(entry.id.clone()) {
            return Err(SuiteError::DuplicateBenchmark(entry.id));
        }
        let metric = MetricId::parse(&entry.metric).ok_or_else(|| SuiteError::UnknownMetric {
            benchmark: entry.id.clone(),
            metric: entry.metric.clone(),
        })?;
        if entry.weight <= 0.0 {
            return Err(SuiteError::NonPositiveWeight(entry.id));
        }
        let task_path = base.join(&entry.task_file);
        let tasks = load_tasks(&task_path)?;
        benchmarks.push(Benchmark {
            id: entry.id,
            category: entry.category,
            metric,
            weight: entry.weight,
            tools: entry.tools,
            judge: entry.judge,
            tasks,
        });
    }

    Ok(SuiteManifest {
        benchmarks,
        limits: file.limits.unwrap_or_default(),
        digest: sha256_hex(&bytes),
    })
}

fn load_tasks(path: &Path) -> Result<Vec<Task>, SuiteError> {
    let text = std::fs::read_to_string(path).map_err(|e| SuiteError::TaskFile {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut tasks = Vec::new();
    let mut ids = HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let task: Task = serde_json::from_str(line).map_err(|e| SuiteError::TaskFile {
            path: path.to_path_buf(),
            message: format!("line {}: {}", lineno + 1, e),
        })?;
        if !ids.insert(task.id.clone()) {
            return Err(SuiteError::TaskFile {
                path: path.to_path_buf(),
                message: format!("duplicate task id `{}`", task.id),
            });
        }
        tasks.push(task);
    }
    if tasks.is_empty() {
        return Err(SuiteError::TaskFile {
            path: path.to_path_buf(),
            message: "no tasks".into(),
        });
    }
    Ok(tasks)
}

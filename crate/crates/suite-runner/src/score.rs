//! Turning a run log into a score report: per-benchmark means and
//! confidence intervals, category and overall macro scores, and costs.

use std::collections::{BTreeMap, BTreeSet};

use cost_ledger::{aggregate_costs, cost_of, CostError, Money, PriceSnapshot};
use judge_rubrics::{Grade, IngredientCandidate, Judge, JudgeRequest, VerdictKind};
use metric_kernel::{confidence_interval, f1_result_set, macro_aggregate, recall_at_n, BenchmarkStat};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::manifest::{MetricId, SuiteManifest};
use crate::run::RunLog;

/// The four benchmark categories; the overall macro score is reported only
/// when a run covers all of them.
pub const CATEGORIES: [&str; 4] = ["code", "data", "discovery", "lit"];

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("run log was produced from a different manifest (digest mismatch)")]
    ManifestMismatch,
    #[error("benchmark `{benchmark}` task `{task}`: {problem}")]
    TaskMismatch { benchmark: String, task: String, problem: &'static str },
    #[error("benchmark `{0}` needs a judge to score")]
    JudgeRequired(String),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Metric(#[from] metric_kernel::MetricError),
}

/// Score one answer against its gold payload, on a 0..=1 scale.
/// Malformed gold or an unparsable answer is an error message for the log.
pub fn score_answer(metric: MetricId, answer: &str, gold: &Value) -> Result<f64, String> {
    match metric {
        MetricId::McAccuracy => {
            let key = gold.as_str().ok_or("gold for mc_accuracy must be a string")?;
            let hit = answer.trim().eq_ignore_ascii_case(key.trim());
            Ok(if hit { 1.0 } else { 0.0 })
        }
        MetricId::ResultSetF1 => {
            let gold = id_set(gold).ok_or("gold for result_set_f1 must be a list of ids")?;
            let predicted: BTreeSet<String> = split_ids(answer).into_iter().collect();
            Ok(f1_result_set(&predicted, &gold))
        }
        MetricId::RecallAtN => {
            let relevant = gold
                .get("relevant")
                .and_then(id_set)
                .ok_or("gold for recall_at_n must carry a `relevant` id list")?;
            let n = gold
                .get("n")
                .and_then(Value::as_u64)
                .ok_or("gold for recall_at_n must carry `n`")? as usize;
            Ok(recall_at_n(&split_ids(answer), &relevant, n))
        }
        MetricId::RubricItems => Err("rubric_items is judge-scored at report time".into()),
    }
}

fn id_set(value: &Value) -> Option<BTreeSet<String>> {
    value
        .as_array()?
        .iter()
        .map(|v| v.as_str().map(str::to_string))
        .collect()
}

fn split_ids(answer: &str) -> Vec<String> {
    answer
        .split(|c: char| c == ',' || c.is_whitespace())
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Judge an answer against the gold rubric items: weighted fraction of
/// supported items (answer-critical counts double). Invalid verdicts count
/// as unsupported, never dropped.
fn rubric_score(
    judge: &dyn Judge,
    task_id: &str,
    answer: &str,
    items: &[IngredientCandidate],
) -> f64 {
    if items.is_empty() {
        return 0.0;
    }
    let requests: Vec<JudgeRequest> = items
        .iter()
        .enumerate()
        .map(|(i, item)| JudgeRequest {
            kind: VerdictKind::RubricItem,
            target_id: format!("{task_id}#{i}"),
            material: format!("item: {}\n\nanswer: {}", item.statement, answer),
        })
        .collect();
    let verdicts: BTreeMap<String, Grade> = judge
        .judge(&requests)
        .into_iter()
        .map(|v| (v.target_id, v.grade))
        .collect();

    let mut supported = 0u32;
    let mut total = 0u32;
    for (i, item) in items.iter().enumerate() {
        let weight = item.importance.weight();
        total += weight;
        let grade = verdicts.get(&format!("{task_id}#{i}"));
        if matches!(grade, Some(Grade::RubricItem { supported: true })) {
            supported += weight;
        }
    }
    supported as f64 / total as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkScore {
    pub id: String,
    pub category: String,
    pub weight: f64,
    /// Mean per-task score, on a 0..=100 scale.
    pub mean: f64,
    /// 95% CI half-width on the same scale; absent under two tasks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<f64>,
    /// Per-task scores (0..=1) backing the mean, sorted by task id.
    pub task_scores: Vec<(String, f64)>,
    pub cost: Money,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub agent: String,
    pub model: String,
    pub price_snapshot_id: String,
    pub benchmarks: Vec<BenchmarkScore>,
    /// Weighted category means of benchmark means (0..=100 scale).
    pub categories: BTreeMap<String, f64>,
    /// Unweighted mean of category means; only when all four categories ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overall: Option<f64>,
    pub total_cost: Money,
    pub mean_cost_per_task: Money,
    pub fallback_priced_models: BTreeSet<String>,
}

impl ScoreReport {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        bytes.push(b'\n');
        bytes
    }

    /// Human-readable table.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("agent: {}  model: {}\n", self.agent, self.model));
        out.push_str(&format!("prices: {}\n\n", self.price_snapshot_id));
        out.push_str("benchmark | category | mean | ci | cost\n");
        for b in &self.benchmarks {
            let ci = b.ci.map(|c| format!("{c:.2}")).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{} | {} | {:.2} | {} | {}\n",
                b.id, b.category, b.mean, ci, b.cost
            ));
        }
        out.push('\n');
        for (category, mean) in &self.categories {
            out.push_str(&format!("category {category}: {mean:.4}\n"));
        }
        match self.overall {
            Some(overall) => out.push_str(&format!("overall: {overall:.4}\n")),
            None => out.push_str("overall: n/a (not all categories covered)\n"),
        }
        out.push_str(&format!(
            "total cost: {}  mean per task: {}\n",
            self.total_cost, self.mean_cost_per_task
        ));
        out
    }
}

pub fn score_run(
    log: &RunLog,
    suite: &SuiteManifest,
    prices: &PriceSnapshot,
    judge: Option<&dyn Judge>,
) -> Result<ScoreReport, ScoreError> {
    if log.manifest_digest != suite.digest {
        return Err(ScoreError::ManifestMismatch);
    }

    // Index log records and check the log covers the manifest exactly.
    let mut by_key = BTreeMap::new();
    for record in &log.tasks {
        if by_key.insert((record.benchmark_id.clone(), record.task_id.clone()), record).is_some() {
            return Err(ScoreError::TaskMismatch {
                benchmark: record.benchmark_id.clone(),
                task: record.task_id.clone(),
                problem: "appears more than once in the log",
            });
        }
    }
    let manifest_tasks: usize = suite.benchmarks.iter().map(|b| b.tasks.len()).sum();
    if manifest_tasks != log.tasks.len() {
        return Err(ScoreError::ManifestMismatch);
    }

    let mut benchmarks = Vec::with_capacity(suite.benchmarks.len());
    let mut stats = Vec::with_capacity(suite.benchmarks.len());
    for bench in &suite.benchmarks {
        let mut task_scores = Vec::with_capacity(bench.tasks.len());
        let mut cost = Money::ZERO;
        for task in &bench.tasks {
            let record = by_key.get(&(bench.id.clone(), task.id.clone())).ok_or_else(|| {
                ScoreError::TaskMismatch {
                    benchmark: bench.id.clone(),
                    task: task.id.clone(),
                    problem: "missing from the log",
                }
            })?;
            let score = match record.score {
                Some(score) => score,
                None => {
                    let judge = judge.ok_or_else(|| ScoreError::JudgeRequired(bench.id.clone()))?;
                    let items: Vec<IngredientCandidate> = serde_json::from_value(task.gold.clone())
                        .map_err(|_| ScoreError::TaskMismatch {
                            benchmark: bench.id.clone(),
                            task: task.id.clone(),
                            problem: "gold is not a rubric item list",
                        })?;
                    let answer = record.answer.as_deref().unwrap_or("");
                    rubric_score(judge, &task.id, answer, &items)
                }
            };
            task_scores.push((task.id.clone(), score));
            for usage in &record.usage {
                cost += cost_of(usage, prices)?.dollars;
            }
        }
        task_scores.sort_by(|a, b| a.0.cmp(&b.0));
        let scaled: Vec<f64> = task_scores.iter().map(|(_, s)| s * 100.0).collect();
        let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
        let ci = confidence_interval(&scaled);
        stats.push(BenchmarkStat {
            benchmark: bench.id.clone(),
            category: bench.category.clone(),
            mean,
            weight: bench.weight,
        });
        benchmarks.push(BenchmarkScore {
            id: bench.id.clone(),
            category: bench.category.clone(),
            weight: bench.weight,
            mean,
            ci,
            task_scores,
            cost,
        });
    }
    benchmarks.sort_by(|a, b| a.id.cmp(&b.id));

    let aggregate = macro_aggregate(&stats)?;
    let covered: BTreeSet<&str> = aggregate.categories.keys().map(String::as_str).collect();
    let overall = CATEGORIES
        .iter()
        .all(|c| covered.contains(c))
        .then_some(aggregate.overall);

    let breakdown = aggregate_costs(&log.usage_records(), prices)?;

    Ok(ScoreReport {
        agent: log.agent.clone(),
        model: log.model.clone(),
        price_snapshot_id: log.price_snapshot_id.clone(),
        benchmarks,
        categories: aggregate.categories,
        overall,
        total_cost: breakdown.run_total,
        mean_cost_per_task: breakdown.mean_cost_per_task,
        fallback_priced_models: breakdown.fallback_models,
    })
}

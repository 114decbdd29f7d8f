//! Running an agent over a suite: tool-policy enforcement, per-task
//! isolation, timeouts, and the resulting run log.

use std::collections::{BTreeMap, VecDeque};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use baseline_agents::{react_run, ReactLimits, Termination};
use model_gateway::{ChatModel, Gateway, ScriptedModel, Toolbox, UsageLog, UsageRecord};
use serde::{Deserialize, Serialize};

use crate::manifest::{sha256_hex, JudgeSettings, RunLimits, SuiteManifest, ToolPolicy};
use crate::score::score_answer;

/// Builds the widest toolbox a benchmark's policy admits (cutoff and paper
/// restriction applied); the runner then narrows it to the allowed names,
/// so tools outside the policy are unreachable rather than merely erroring.
pub trait Environment: Send + Sync {
    fn toolbox(&self, policy: &ToolPolicy) -> Toolbox;
}

/// An environment with no tools at all; answer-only benchmarks.
pub struct EmptyEnvironment;

impl Environment for EmptyEnvironment {
    fn toolbox(&self, _policy: &ToolPolicy) -> Toolbox {
        Toolbox::new()
    }
}

/// Yields one model instance per task so scripted cursors and usage logs
/// never interleave across concurrent tasks.
pub trait ModelSource: Send + Sync {
    fn model_id(&self) -> String;
    fn fresh(&self) -> Arc<dyn ChatModel>;
}

/// Replays the same scripted-model file for every task.
pub struct ScriptSource {
    model_id: String,
    rules: Vec<model_gateway::ScriptRule>,
}

impl ScriptSource {
    pub fn load(path: &std::path::Path) -> std::io::Result<Self> {
        let model = ScriptedModel::from_file(path)?;
        Ok(ScriptSource { model_id: model.model_id_owned(), rules: model.into_rules() })
    }

    pub fn new(model_id: impl Into<String>, rules: Vec<model_gateway::ScriptRule>) -> Self {
        ScriptSource { model_id: model_id.into(), rules }
    }
}

impl ModelSource for ScriptSource {
    fn model_id(&self) -> String {
        self.model_id.clone()
    }

    fn fresh(&self) -> Arc<dyn ChatModel> {
        Arc::new(ScriptedModel::new(self.model_id.clone(), self.rules.clone()))
    }
}

#[derive(Debug, Clone)]
pub struct AgentOutcome {
    pub answer: Option<String>,
    /// Why the task produced no usable answer, when it did not.
    pub failure: Option<String>,
    pub transcript: Option<serde_json::Value>,
}

pub trait SuiteAgent: Send + Sync {
    fn identity(&self) -> String;
    fn run_task(&self, gateway: &Gateway, task_id: &str, input: &str, tools: &Toolbox) -> AgentOutcome;
}

/// The tool-calling loop agent.
pub struct ReactAgent {
    pub limits: ReactLimits,
}

impl Default for ReactAgent {
    fn default() -> Self {
        ReactAgent { limits: ReactLimits::default() }
    }
}

impl SuiteAgent for ReactAgent {
    fn identity(&self) -> String {
        "react".into()
    }

    fn run_task(&self, gateway: &Gateway, task_id: &str, input: &str, tools: &Toolbox) -> AgentOutcome {
        let transcript = react_run(gateway, task_id, input, tools, self.limits.clone());
        let failure = match transcript.termination {
            Termination::Submitted => None,
            Termination::StepLimit => Some("step limit reached without submission".to_string()),
            Termination::Error => {
                Some(transcript.error.clone().unwrap_or_else(|| "model error".into()))
            }
        };
        AgentOutcome {
            answer: transcript.answer.clone(),
            failure,
            transcript: serde_json::to_value(&transcript).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub benchmark_id: String,
    pub task_id: String,
    /// sha256 of the task input text.
    pub input_digest: String,
    pub answer: Option<String>,
    /// `None` only for judge-scored metrics, which are graded at report
    /// time; failures always score zero here so nothing is dropped.
    pub score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<serde_json::Value>,
    pub usage: Vec<UsageRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub agent: String,
    pub model: String,
    pub manifest_digest: String,
    pub price_snapshot_id: String,
    /// Per-benchmark judge settings echoed from the manifest.
    pub judge_config: BTreeMap<String, JudgeSettings>,
    /// Sorted by (benchmark id, task id); every manifest task exactly once.
    pub tasks: Vec<TaskRecord>,
}

impl RunLog {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("run log serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn usage_records(&self) -> Vec<UsageRecord> {
        self.tasks.iter().flat_map(|t| t.usage.iter().cloned()).collect()
    }
}

struct Job {
    benchmark: usize,
    task: usize,
}

pub fn evaluate(
    agent: Arc<dyn SuiteAgent>,
    suite: &SuiteManifest,
    env: Arc<dyn Environment>,
    model: Arc<dyn ModelSource>,
    limits: RunLimits,
    price_snapshot_id: &str,
) -> RunLog {
    let mut queue = VecDeque::new();
    for (b, bench) in suite.benchmarks.iter().enumerate() {
        for t in 0..bench.tasks.len() {
            queue.push_back(Job { benchmark: b, task: t });
        }
    }
    let queue = Mutex::new(queue);
    let records = Mutex::new(Vec::new());

    std::thread::scope(|scope| {
        for _ in 0..limits.parallelism.max(1) {
            scope.spawn(|| loop {
                let job = match queue.lock().unwrap().pop_front() {
                    Some(job) => job,
                    None => break,
                };
                let record = run_one(&agent, suite, &env, &model, limits, &job);
                records.lock().unwrap().push(record);
            });
        }
    });

    let mut tasks = records.into_inner().unwrap();
    tasks.sort_by(|a, b| {
        (a.benchmark_id.as_str(), a.task_id.as_str()).cmp(&(b.benchmark_id.as_str(), b.task_id.as_str()))
    });

    let judge_config = suite
        .benchmarks
        .iter()
        .filter_map(|b| b.judge.clone().map(|j| (b.id.clone(), j)))
        .collect();

    RunLog {
        agent: agent.identity(),
        model: model.model_id(),
        manifest_digest: suite.digest.clone(),
        price_snapshot_id: price_snapshot_id.to_string(),
        judge_config,
        tasks,
    }
}

fn run_one(
    agent: &Arc<dyn SuiteAgent>,
    suite: &SuiteManifest,
    env: &Arc<dyn Environment>,
    model: &Arc<dyn ModelSource>,
    limits: RunLimits,
    job: &Job,
) -> TaskRecord {
    let bench = &suite.benchmarks[job.benchmark];
    let task = bench.tasks[job.task].clone();
    let metric = bench.metric;
    let benchmark_id = bench.id.clone();
    let input_digest = sha256_hex(task.input.as_bytes());

    let (tx, rx) = mpsc::channel();
    let agent = Arc::clone(agent);
    let env = Arc::clone(env);
    let model = Arc::clone(model);
    let policy = bench.tools.clone();
    let worker_task = task.clone();
    std::thread::spawn(move || {
        let toolbox = env.toolbox(&policy).restricted(&policy.allowed_tools);
        let log = Arc::new(UsageLog::new());
        let gateway = Gateway::new(model.fresh(), Arc::clone(&log));
        let outcome = agent.run_task(&gateway, &worker_task.id, &worker_task.input, &toolbox);
        let _ = tx.send((outcome, log.records()));
    });

    let timeout = Duration::from_secs(limits.task_timeout_secs);
    let (outcome, usage) = match rx.recv_timeout(timeout) {
        Ok(result) => result,
        Err(_) => {
            // The worker thread is abandoned; its usage cannot be trusted.
            return TaskRecord {
                benchmark_id,
                task_id: task.id,
                input_digest,
                answer: None,
                score: Some(0.0),
                failure: Some(format!("timed out after {}s", limits.task_timeout_secs)),
                transcript_digest: None,
                transcript: None,
                usage: Vec::new(),
            };
        }
    };

    let (score, failure) = match (&outcome.failure, &outcome.answer) {
        (Some(reason), _) => (Some(0.0), Some(reason.clone())),
        (None, None) => (Some(0.0), Some("no answer submitted".to_string())),
        (None, Some(answer)) if metric.needs_judge() => {
            let _ = answer;
            (None, None)
        }
        (None, Some(answer)) => match score_answer(metric, answer, &task.gold) {
            Ok(score) => (Some(score), None),
            Err(message) => (Some(0.0), Some(message)),
        },
    };

    let transcript_digest = outcome
        .transcript
        .as_ref()
        .map(|t| sha256_hex(serde_json::to_string(t).expect("transcript serializes").as_bytes()));

    TaskRecord {
        benchmark_id,
        task_id: task.id,
        input_digest,
        answer: outcome.answer,
        score,
        failure,
        transcript_digest,
        transcript: outcome.transcript,
        usage,
    }
}

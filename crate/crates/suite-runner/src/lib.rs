//! Benchmark suite runner: loads manifests, runs an agent over every task
//! under the manifest's tool policy, and scores the resulting run log.

pub mod manifest;
pub mod run;
pub mod score;

pub use manifest::{
    load_suite, Benchmark, JudgeSettings, MetricId, RunLimits, SuiteError, SuiteManifest, Task,
    ToolPolicy,
};
pub use run::{
    evaluate, AgentOutcome, EmptyEnvironment, Environment, ModelSource, ReactAgent, RunLog,
    ScriptSource, SuiteAgent, TaskRecord,
};
pub use score::{score_answer, score_run, BenchmarkScore, ScoreError, ScoreReport, CATEGORIES};

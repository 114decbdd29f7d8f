//! Suite loading, evaluation under tool policies, and run scoring.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use cost_ledger::parse_price_snapshot;
use judge_rubrics::judge::{JudgeScript, ScriptedJudge};
use judge_rubrics::VerdictKind;
use metric_kernel::{macro_aggregate, BenchmarkStat};
use model_gateway::mock::ScriptedToolCall;
use model_gateway::{Gateway, Matcher, ScriptRule, ScriptedResponse, Toolbox, Usage};
use model_gateway::{ParamType, ToolDescriptor, ToolError, ToolHandler, ToolParam};
use suite_runner::{
    evaluate, load_suite, score_run, AgentOutcome, Benchmark, EmptyEnvironment, Environment,
    MetricId, ReactAgent, RunLimits, RunLog, ScriptSource, SuiteAgent, SuiteError, SuiteManifest,
    Task, TaskRecord, ToolPolicy,
};

const PRICES: &str = r#"
snapshot_id = "2025-07-fixture"

[models."mock-m"]
input = "1"
output = "2"
"#;

fn write_file(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut file = std::fs::File::create(&path).unwrap();
    file.write_all(contents.as_bytes()).unwrap();
    path
}

fn two_benchmark_manifest(dir: &Path) -> std::path::PathBuf {
    write_file(
        dir,
        "qa.jsonl",
        r#"{"id": "q1", "input": "pick b", "gold": "b"}
{"id": "q2", "input": "pick b again", "gold": "b"}
"#,
    );
    write_file(
        dir,
        "sets.jsonl",
        r#"{"id": "s1", "input": "list ids", "gold": ["p1", "p2"]}
"#,
    );
    write_file(
        dir,
        "suite.toml",
        r#"
[limits]
parallelism = 2
task_timeout_secs = 60

[[benchmarks]]
id = "litqa2"
category = "lit"
task_file = "qa.jsonl"
metric = "mc_accuracy"
weight = 0.5

[benchmarks.tools]
allowed_tools = ["lookup"]
cutoff = "2024-10-17"

[[benchmarks]]
id = "paperfind"
category = "lit"
task_file = "sets.jsonl"
metric = "result_set_f1"
weight = 0.5

[benchmarks.tools]
allowed_tools = []
"#,
    )
}

#[test]
fn empty_manifest_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "suite.toml", "[limits]\nparallelism = 1\n");
    assert!(matches!(load_suite(&path), Err(SuiteError::EmptySuite)));
}

#[test]
fn two_benchmark_fixture_parses_with_cutoffs() {
    let dir = tempfile::tempdir().unwrap();
    let suite = load_suite(&two_benchmark_manifest(dir.path())).unwrap();
    assert_eq!(suite.benchmarks.len(), 2);
    assert_eq!(suite.limits.parallelism, 2);

    let qa = &suite.benchmarks[0];
    assert_eq!(qa.id, "litqa2");
    assert_eq!(qa.metric, MetricId::McAccuracy);
    assert_eq!(qa.tasks.len(), 2);
    assert_eq!(qa.tools.allowed_tools, vec!["lookup".to_string()]);
    assert_eq!(qa.tools.cutoff.unwrap().0, "2024-10-17".parse().unwrap());

    let sets = &suite.benchmarks[1];
    assert_eq!(sets.metric, MetricId::ResultSetF1);
    assert!(sets.tools.cutoff.is_none());
    // The paired evals split one macro slot between them.
    assert_eq!(qa.weight, 0.5);
    assert_eq!(sets.weight, 0.5);
}

#[test]
fn unknown_metric_and_bad_cutoff_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_file(dir.path(), "t.jsonl", r#"{"id": "t", "input": "x", "gold": "y"}"#);

    let path = write_file(
        dir.path(),
        "bad_metric.toml",
        r#"
[[benchmarks]]
id = "b"
category = "lit"
task_file = "t.jsonl"
metric = "bleu"
"#,
    );
    assert!(matches!(load_suite(&path), Err(SuiteError::UnknownMetric { .. })));

    let path = write_file(
        dir.path(),
        "bad_cutoff.toml",
        r#"
[[benchmarks]]
id = "b"
category = "lit"
task_file = "t.jsonl"
metric = "mc_accuracy"
[benchmarks.tools]
cutoff = "late 2024"
"#,
    );
    assert!(matches!(load_suite(&path), Err(SuiteError::Parse(_))));
}

#[test]
fn duplicate_benchmark_id_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_file(dir.path(), "t.jsonl", r#"{"id": "t", "input": "x", "gold": "y"}"#);
    let path = write_file(
        dir.path(),
        "dup.toml",
        r#"
[[benchmarks]]
id = "b"
category = "lit"
task_file = "t.jsonl"
metric = "mc_accuracy"

[[benchmarks]]
id = "b"
category = "code"
task_file = "t.jsonl"
metric = "mc_accuracy"
"#,
    );
    assert!(matches!(load_suite(&path), Err(SuiteError::DuplicateBenchmark(_))));
}

// --- evaluation fixtures ---------------------------------------------------

struct EchoTool {
    name: &'static str,
}

impl ToolHandler for EchoTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: self.name.to_string(),
            description: "echoes its query".into(),
            params: vec![ToolParam {
                name: "query".into(),
                description: "text to echo".into(),
                param_type: ParamType::String,
                required: true,
            }],
        }
    }

    fn invoke(&self, args: &serde_json::Value) -> Result<serde_json::Value, ToolError> {
        Ok(serde_json::json!({ "echo": args["query"] }))
    }
}

/// Offers both a policy tool and a non-policy tool; the runner must make
/// the latter unreachable.
struct TwoToolEnv;

impl Environment for TwoToolEnv {
    fn toolbox(&self, _policy: &ToolPolicy) -> Toolbox {
        let mut toolbox = Toolbox::new();
        toolbox.register(Arc::new(EchoTool { name: "lookup" }));
        toolbox.register(Arc::new(EchoTool { name: "secret" }));
        toolbox
    }
}

fn submit_rule(answer: &str) -> ScriptRule {
    ScriptRule {
        matcher: Matcher::Any,
        response: ScriptedResponse {
            content: String::new(),
            tool_calls: vec![ScriptedToolCall {
                name: "submit".into(),
                arguments: serde_json::json!({ "answer": answer }),
            }],
            usage: Some(Usage {
                input_tokens: 100,
                output_tokens: 10,
                cache_read_tokens: 0,
                cache_write_tokens: 0,
            }),
        },
    }
}

fn loaded_suite(dir: &Path) -> SuiteManifest {
    load_suite(&two_benchmark_manifest(dir)).unwrap()
}

#[test]
fn always_submit_agent_answers_every_task() {
    let dir = tempfile::tempdir().unwrap();
    let suite = loaded_suite(dir.path());
    let model = Arc::new(ScriptSource::new("mock-m", vec![submit_rule("b")]));
    let log = evaluate(
        Arc::new(ReactAgent::default()),
        &suite,
        Arc::new(TwoToolEnv),
        model,
        suite.limits,
        "2025-07-fixture",
    );

    assert_eq!(log.tasks.len(), 3);
    for task in &log.tasks {
        assert_eq!(task.answer.as_deref(), Some("b"));
        assert!(task.failure.is_none());
    }
    // mc tasks match gold "b"; the set task's answer "b" matches neither id.
    let by_id: BTreeMap<_, _> = log.tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    assert_eq!(by_id["q1"].score, Some(1.0));
    assert_eq!(by_id["q2"].score, Some(1.0));
    assert_eq!(by_id["s1"].score, Some(0.0));
}

#[test]
fn logged_tokens_sum_the_scripted_usages() {
    let dir = tempfile::tempdir().unwrap();
    let suite = loaded_suite(dir.path());
    let model = Arc::new(ScriptSource::new("mock-m", vec![submit_rule("b")]));
    let log = evaluate(
        Arc::new(ReactAgent::default()),
        &suite,
        Arc::new(TwoToolEnv),
        model,
        suite.limits,
        "2025-07-fixture",
    );

    // One scripted call per task, 110 tokens each.
    let records = log.usage_records();
    assert_eq!(records.len(), 3);
    let total: u64 = records.iter().map(|r| r.input_tokens + r.output_tokens).sum();
    assert_eq!(total, 3 * 110);
}

#[test]
fn two_identical_runs_produce_byte_identical_logs() {
    let dir = tempfile::tempdir().unwrap();
    let suite = loaded_suite(dir.path());
    let run = || {
        evaluate(
            Arc::new(ReactAgent::default()),
            &suite,
            Arc::new(TwoToolEnv),
            Arc::new(ScriptSource::new("mock-m", vec![submit_rule("b")])),
            RunLimits { parallelism: 4, task_timeout_secs: 60 },
            "2025-07-fixture",
        )
    };
    assert_eq!(run().to_json_bytes(), run().to_json_bytes());
}

#[test]
fn non_policy_tools_are_unreachable() {
    let dir = tempfile::tempdir().unwrap();
    write_file(dir.path(), "t.jsonl", r#"{"id": "t1", "input": "probe", "gold": "done"}"#);
    let path = write_file(
        dir.path(),
        "suite.toml",
        r#"
[[benchmarks]]
id = "probe"
category = "code"
task_file = "t.jsonl"
metric = "mc_accuracy"
[benchmarks.tools]
allowed_tools = ["lookup"]
"#,
    );
    let suite = load_suite(&path).unwrap();

    // The agent tries the non-policy tool first, then the policy tool,
    // then submits.
    let call = |name: &str| ScriptRule {
        matcher: Matcher::Any,
        response: ScriptedResponse {
            content: String::new(),
            tool_calls: vec![ScriptedToolCall {
                name: name.into(),
                arguments: serde_json::json!({ "query": "x" }),
            }],
            usage: None,
        },
    };
    let rules = vec![call("secret"), call("lookup"), submit_rule("done")];
    let log = evaluate(
        Arc::new(ReactAgent::default()),
        &suite,
        Arc::new(TwoToolEnv),
        Arc::new(ScriptSource::new("mock-m", rules)),
        suite.limits,
        "2025-07-fixture",
    );

    let task = &log.tasks[0];
    assert_eq!(task.answer.as_deref(), Some("done"));
    let transcript = serde_json::to_string(task.transcript.as_ref().unwrap()).unwrap();
    assert!(transcript.contains("unknown tool: secret"), "secret call must fail: {transcript}");
    assert!(transcript.contains(r#"\"echo\""#), "lookup call must succeed");
}

struct StallingAgent;

impl SuiteAgent for StallingAgent {
    fn identity(&self) -> String {
        "staller".into()
    }

    fn run_task(&self, _: &Gateway, _: &str, _: &str, _: &Toolbox) -> AgentOutcome {
        std::thread::sleep(std::time::Duration::from_secs(3600));
        unreachable!()
    }
}

#[test]
fn timed_out_task_scores_zero_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    write_file(dir.path(), "t.jsonl", r#"{"id": "t1", "input": "x", "gold": "y"}"#);
    let path = write_file(
        dir.path(),
        "suite.toml",
        r#"
[[benchmarks]]
id = "slow"
category = "code"
task_file = "t.jsonl"
metric = "mc_accuracy"
"#,
    );
    let suite = load_suite(&path).unwrap();
    let log = evaluate(
        Arc::new(StallingAgent),
        &suite,
        Arc::new(EmptyEnvironment),
        Arc::new(ScriptSource::new("mock-m", vec![])),
        RunLimits { parallelism: 1, task_timeout_secs: 1 },
        "2025-07-fixture",
    );
    let task = &log.tasks[0];
    assert_eq!(task.score, Some(0.0));
    assert!(task.failure.as_deref().unwrap().contains("timed out"));
}

// --- scoring ----------------------------------------------------------------

/// Manifest and matching hand-built log, one benchmark per category, each
/// with a single task carrying a fixed score.
fn scored_fixture(scores: &[(&str, &str, f64)]) -> (SuiteManifest, RunLog) {
    let benchmarks: Vec<Benchmark> = scores
        .iter()
        .map(|(id, category, _)| Benchmark {
            id: id.to_string(),
            category: category.to_string(),
            metric: MetricId::McAccuracy,
            weight: 1.0,
            tools: ToolPolicy::default(),
            judge: None,
            tasks: vec![Task {
                id: format!("{id}-t1"),
                input: "fixed".into(),
                gold: serde_json::Value::String("x".into()),
            }],
        })
        .collect();
    let suite = SuiteManifest { benchmarks, limits: RunLimits::default(), digest: "fix".into() };
    let tasks = scores
        .iter()
        .map(|(id, _, score)| TaskRecord {
            benchmark_id: id.to_string(),
            task_id: format!("{id}-t1"),
            input_digest: String::new(),
            answer: Some("x".into()),
            score: Some(*score),
            failure: None,
            transcript_digest: None,
            transcript: None,
            usage: vec![],
        })
        .collect();
    let log = RunLog {
        agent: "react".into(),
        model: "mock-m".into(),
        manifest_digest: "fix".into(),
        price_snapshot_id: "2025-07-fixture".into(),
        judge_config: BTreeMap::new(),
        tasks,
    };
    (suite, log)
}

#[test]
fn all_correct_benchmark_means_100() {
    let prices = parse_price_snapshot(PRICES).unwrap();
    let (suite, log) = scored_fixture(&[("b1", "lit", 1.0)]);
    let report = score_run(&log, &suite, &prices, None).unwrap();
    assert_eq!(report.benchmarks[0].mean, 100.0);
    assert!(report.overall.is_none(), "one category must not produce an overall score");
}

#[test]
fn category_overall_reproduces_published_macro_means() {
    let prices = parse_price_snapshot(PRICES).unwrap();
    let (suite, log) = scored_fixture(&[
        ("lit-bench", "lit", 0.622254),
        ("code-bench", "code", 0.475954),
        ("data-bench", "data", 0.331725),
        ("e2e-bench", "discovery", 0.688483),
    ]);
    let report = score_run(&log, &suite, &prices, None).unwrap();
    assert!((report.categories["lit"] - 62.2254).abs() < 1e-9);
    assert!((report.overall.unwrap() - 52.9604).abs() < 1e-4);
}

#[test]
fn report_matches_macro_aggregate_on_the_same_inputs() {
    let prices = parse_price_snapshot(PRICES).unwrap();
    let (suite, log) = scored_fixture(&[
        ("a", "lit", 0.4),
        ("b", "lit", 0.9),
        ("c", "code", 0.8),
        ("d", "data", 0.7),
        ("e", "discovery", 0.4),
    ]);
    let report = score_run(&log, &suite, &prices, None).unwrap();

    let stats: Vec<BenchmarkStat> = report
        .benchmarks
        .iter()
        .map(|b| BenchmarkStat {
            benchmark: b.id.clone(),
            category: b.category.clone(),
            mean: b.mean,
            weight: b.weight,
        })
        .collect();
    let oracle = macro_aggregate(&stats).unwrap();
    assert_eq!(report.categories, oracle.categories);
    assert_eq!(report.overall, Some(oracle.overall));
}

#[test]
fn report_means_are_recomputable_from_task_scores() {
    let dir = tempfile::tempdir().unwrap();
    let suite = loaded_suite(dir.path());
    let log = evaluate(
        Arc::new(ReactAgent::default()),
        &suite,
        Arc::new(TwoToolEnv),
        Arc::new(ScriptSource::new("mock-m", vec![submit_rule("b")])),
        suite.limits,
        "2025-07-fixture",
    );
    let prices = parse_price_snapshot(PRICES).unwrap();
    let report = score_run(&log, &suite, &prices, None).unwrap();

    for bench in &report.benchmarks {
        let audited: f64 = bench.task_scores.iter().map(|(_, s)| s * 100.0).sum::<f64>()
            / bench.task_scores.len() as f64;
        assert_eq!(bench.mean, audited);
        for (task_id, score) in &bench.task_scores {
            let logged = log
                .tasks
                .iter()
                .find(|t| t.benchmark_id == bench.id && &t.task_id == task_id)
                .unwrap();
            assert_eq!(logged.score, Some(*score));
        }
    }
}

#[test]
fn run_costs_price_every_logged_call() {
    let dir = tempfile::tempdir().unwrap();
    let suite = loaded_suite(dir.path());
    let log = evaluate(
        Arc::new(ReactAgent::default()),
        &suite,
        Arc::new(TwoToolEnv),
        Arc::new(ScriptSource::new("mock-m", vec![submit_rule("b")])),
        suite.limits,
        "2025-07-fixture",
    );
    let prices = parse_price_snapshot(PRICES).unwrap();
    let report = score_run(&log, &suite, &prices, None).unwrap();

    // Prices are $/1M tokens: 3 calls x (100 in x $1/M + 10 out x $2/M).
    let per_call_pico = 100i128 * 1_000_000 + 10 * 2_000_000;
    assert_eq!(report.total_cost.picodollars(), 3 * per_call_pico);
    assert_eq!(
        report.benchmarks.iter().map(|b| b.cost.picodollars()).sum::<i128>(),
        report.total_cost.picodollars()
    );
}

#[test]
fn identical_runs_render_identical_report_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let suite = loaded_suite(dir.path());
    let prices = parse_price_snapshot(PRICES).unwrap();
    let render = || {
        let log = evaluate(
            Arc::new(ReactAgent::default()),
            &suite,
            Arc::new(TwoToolEnv),
            Arc::new(ScriptSource::new("mock-m", vec![submit_rule("b")])),
            RunLimits { parallelism: 4, task_timeout_secs: 60 },
            "2025-07-fixture",
        );
        score_run(&log, &suite, &prices, None).unwrap().to_json_bytes()
    };
    assert_eq!(render(), render());
}

#[test]
fn mismatched_manifest_digest_is_rejected() {
    let prices = parse_price_snapshot(PRICES).unwrap();
    let (suite, mut log) = scored_fixture(&[("b1", "lit", 1.0)]);
    log.manifest_digest = "other".into();
    assert!(score_run(&log, &suite, &prices, None).is_err());
}

#[test]
fn rubric_benchmark_is_judge_scored_at_report_time() {
    let dir = tempfile::tempdir().unwrap();
    write_file(
        dir.path(),
        "t.jsonl",
        r#"{"id": "r1", "input": "design a study", "gold": [{"statement": "uses a control group", "importance": "answer-critical"}, {"statement": "cites prior work", "importance": "valuable"}]}"#,
    );
    let path = write_file(
        dir.path(),
        "suite.toml",
        r#"
[[benchmarks]]
id = "rubric"
category = "discovery"
task_file = "t.jsonl"
metric = "rubric_items"
[benchmarks.judge]
system_prompt = "grade strictly"
"#,
    );
    let suite = load_suite(&path).unwrap();
    let log = evaluate(
        Arc::new(ReactAgent::default()),
        &suite,
        Arc::new(EmptyEnvironment),
        Arc::new(ScriptSource::new("mock-m", vec![submit_rule("my study plan")])),
        suite.limits,
        "2025-07-fixture",
    );
    assert_eq!(log.tasks[0].score, None);
    assert!(log.judge_config.contains_key("rubric"));

    let prices = parse_price_snapshot(PRICES).unwrap();
    assert!(
        matches!(score_run(&log, &suite, &prices, None), Err(suite_runner::ScoreError::JudgeRequired(_))),
        "judge-scored metric without a judge must error"
    );

    let judge = ScriptedJudge::new(JudgeScript::default())
        .with_reply(VerdictKind::RubricItem, "r1#0", "supported")
        .with_reply(VerdictKind::RubricItem, "r1#1", "unsupported");
    let report = score_run(&log, &suite, &prices, Some(&judge)).unwrap();
    // critical supported (2) out of total weight 3.
    let (_, score) = report.benchmarks[0].task_scores[0];
    assert!((score - 2.0 / 3.0).abs() < 1e-12);
}

//! `harness`: one binary over the whole evaluation stack — serve the tool
//! environment, run an agent over a suite, score the run, search the
//! corpus, and maintain the leaderboard.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use corpus_engine::{ingest_corpus, read_corpus_file, Corpus, DateCutoff};
use env_service::{corpus_toolbox, ExecConfig, ToolService};
use leaderboard::{read_bundle, render, Store};
use model_gateway::Toolbox;
use suite_runner::{
    evaluate, load_suite, score_run, Environment, ReactAgent, RunLog, ScriptSource, SuiteAgent,
    ToolPolicy,
};

#[derive(Parser)]
#[command(name = "harness", about = "reproducible research-agent evaluation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the corpus tools (and code execution) over stdio or a socket.
    Serve {
        #[arg(long)]
        corpus: PathBuf,
        /// Exclusive date cutoff, YYYY-MM-DD.
        #[arg(long)]
        cutoff: Option<String>,
        /// Unix socket path; stdio when omitted.
        #[arg(long)]
        socket: Option<PathBuf>,
        /// Also expose the stateful python execution tool.
        #[arg(long)]
        exec: bool,
    },
    /// Run an agent over a benchmark suite and write the run log.
    Run {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value = "react")]
        agent: String,
        /// Model spec; only `mock:<script.json>` is supported.
        #[arg(long)]
        model: String,
        /// Corpus backing the benchmark tools; tool-less suites may omit it.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        prices: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a run log into a report.
    Score {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        prices: PathBuf,
        /// Scripted judge file for judge-scored metrics.
        #[arg(long)]
        judge: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search the corpus with the literature-search pipeline.
    FindPapers {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        cutoff: Option<String>,
    },
    /// Leaderboard store operations.
    Leaderboard {
        #[command(subcommand)]
        command: LeaderboardCommand,
    },
}

#[derive(Subcommand)]
enum LeaderboardCommand {
    /// Validate and append a submission bundle (meta.json + report.json).
    Submit {
        #[arg(long)]
        store: PathBuf,
        bundle: PathBuf,
    },
    /// Render the store to static tables and HTML.
    Render {
        #[arg(long, default_value = "board")]
        out: PathBuf,
        store: PathBuf,
    },
}

type CliError = Box<dyn std::error::Error>;

fn parse_cutoff(text: Option<&str>) -> Result<Option<DateCutoff>, CliError> {
    Ok(match text {
        Some(t) => Some(DateCutoff(t.parse().map_err(|e| format!("bad cutoff `{t}`: {e}"))?)),
        None => None,
    })
}

fn load_corpus(path: &Path) -> Result<Arc<Corpus>, CliError> {
    let records = read_corpus_file(path)?;
    Ok(Arc::new(ingest_corpus(records)?))
}

/// Corpus-backed environment for suite runs: tool policies carve their own
/// cutoff-frozen toolbox out of the full corpus toolset.
struct CorpusEnv {
    corpus: Arc<Corpus>,
}

impl Environment for CorpusEnv {
    fn toolbox(&self, policy: &ToolPolicy) -> Toolbox {
        corpus_toolbox(Arc::clone(&self.corpus), policy.cutoff, None)
    }
}

struct NoToolsEnv;

impl Environment for NoToolsEnv {
    fn toolbox(&self, _policy: &ToolPolicy) -> Toolbox {
        Toolbox::new()
    }
}

fn model_source(spec: &str) -> Result<Arc<ScriptSource>, CliError> {
    match spec.strip_prefix("mock:") {
        Some(path) => Ok(Arc::new(ScriptSource::load(Path::new(path))?)),
        None => Err(format!("unsupported model spec `{spec}`; use mock:<script.json>").into()),
    }
}

fn agent_by_name(name: &str) -> Result<Arc<dyn SuiteAgent>, CliError> {
    match name {
        "react" => Ok(Arc::new(ReactAgent::default())),
        other => Err(format!("unknown agent `{other}`").into()),
    }
}

fn main() {
    if let Err(e) = dispatch(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Serve { corpus, cutoff, socket, exec } => {
            let corpus = load_corpus(&corpus)?;
            let cutoff = parse_cutoff(cutoff.as_deref())?;
            let exec = exec.then(ExecConfig::default);
            let service = ToolService::new(corpus_toolbox(corpus, cutoff, exec))?;
            match socket {
                Some(path) => {
                    // Keep the handle alive; parking forever leaves shutdown
                    // to the process signal.
                    let _handle = service.serve_socket(&path)?;
                    eprintln!("serving on {}", path.display());
                    loop {
                        std::thread::park();
                    }
                }
                None => {
                    let stdin = std::io::stdin();
                    let stdout = std::io::stdout();
                    service.serve_stdio(stdin.lock(), stdout.lock())?;
                    Ok(())
                }
            }
        }
        Command::Run { suite, agent, model, corpus, prices, out } => {
            let suite = load_suite(&suite)?;
            let agent = agent_by_name(&agent)?;
            let model = model_source(&model)?;
            let prices = cost_ledger::load_price_snapshot(&prices)?;
            let env: Arc<dyn Environment> = match corpus {
                Some(path) => Arc::new(CorpusEnv { corpus: load_corpus(&path)? }),
                None => Arc::new(NoToolsEnv),
            };
            let log = evaluate(agent, &suite, env, model, suite.limits, &prices.snapshot_id);
            std::fs::write(&out, log.to_json_bytes())?;
            eprintln!("wrote {} ({} tasks)", out.display(), log.tasks.len());
            Ok(())
        }
        Command::Score { run, suite, prices, judge, out } => {
            let log: RunLog = serde_json::from_str(&std::fs::read_to_string(&run)?)?;
            let suite = load_suite(&suite)?;
            let prices = cost_ledger::load_price_snapshot(&prices)?;
            let judge = match judge {
                Some(path) => Some(judge_rubrics::judge::ScriptedJudge::from_file(&path)?),
                None => None,
            };
            let report = score_run(
                &log,
                &suite,
                &prices,
                judge.as_ref().map(|j| j as &dyn judge_rubrics::Judge),
            )?;
            print!("{}", report.summary());
            if let Some(out) = out {
                std::fs::write(&out, report.to_json_bytes())?;
                eprintln!("wrote {}", out.display());
            }
            Ok(())
        }
        Command::FindPapers { corpus, query, cutoff } => {
            let corpus = load_corpus(&corpus)?;
            let cutoff = parse_cutoff(cutoff.as_deref())?;
            let results = paper_finder::find_papers(
                &query,
                &corpus,
                &paper_finder::FinderDeps::default(),
                &paper_finder::SearchBudget::default(),
                cutoff,
            )?;
            for r in &results {
                println!("{:>3}. {}  tier={:?}  score={:.4}", r.rank, r.corpus_id, r.tier, r.score);
            }
            Ok(())
        }
        Command::Leaderboard { command } => match command {
            LeaderboardCommand::Submit { store, bundle } => {
                let mut store = Store::open(&store)?;
                let (meta, report_bytes) = read_bundle(&bundle)?;
                match store.submit(&meta, &report_bytes)? {
                    Ok(()) => {
                        println!("accepted: {} ({})", meta.agent, meta.report_digest);
                        Ok(())
                    }
                    Err(rejection) => Err(format!("rejected: {rejection}").into()),
                }
            }
            LeaderboardCommand::Render { out, store } => {
                let store = Store::open(&store)?;
                let bundle = render(&store)?;
                bundle.write_to(&out)?;
                println!("wrote {}", out.join("leaderboard.html").display());
                Ok(())
            }
        },
    }
}

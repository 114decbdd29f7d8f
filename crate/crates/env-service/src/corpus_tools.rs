//! Tool handlers exposing a frozen corpus and a code-execution session pool.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use corpus_engine::{Corpus, CorpusError, DateCutoff, Direction};
use model_gateway::{ParamType, ToolDescriptor, ToolError, ToolHandler, ToolParam, Toolbox};
use serde_json::{json, Value};

use crate::session::{ExecConfig, ExecSession};

fn param(name: &str, description: &str, param_type: ParamType, required: bool) -> ToolParam {
    ToolParam { name: name.into(), description: description.into(), param_type, required }
}

fn map_corpus_error(e: CorpusError) -> ToolError {
    match e {
        CorpusError::EmptyQuery
        | CorpusError::EmptyTitle
        | CorpusError::EmptyIdList
        | CorpusError::InvalidField(_) => ToolError::InvalidParams(e.to_string()),
        CorpusError::PaperNotFound(_) | CorpusError::AuthorNotFound(_) => {
            ToolError::failed("not_found", e.to_string())
        }
    }
}

fn string_arg(args: &Value, name: &str) -> String {
    args.get(name).and_then(Value::as_str).unwrap_or_default().to_string()
}

fn string_list_arg(args: &Value, name: &str) -> Result<Vec<String>, ToolError> {
    match args.get(name) {
        None | Some(Value::Null) => Ok(vec![]),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(String::from)
                    .ok_or_else(|| ToolError::InvalidParams(format!("{name} must hold strings")))
            })
            .collect(),
        Some(_) => Err(ToolError::InvalidParams(format!("{name} must be an array"))),
    }
}

fn limit_arg(args: &Value, default: usize) -> usize {
    args.get("limit").and_then(Value::as_u64).map(|n| n as usize).unwrap_or(default)
}

/// Shared context for every corpus tool: the corpus plus the date freeze
/// applied uniformly to all of them.
struct CorpusContext {
    corpus: Arc<Corpus>,
    cutoff: Option<DateCutoff>,
}

macro_rules! corpus_tool {
    ($name:ident) => {
        struct $name(Arc<CorpusContext>);
    };
}

corpus_tool!(SnippetSearchTool);
corpus_tool!(PaperRelevanceTool);
corpus_tool!(GetPaperTool);
corpus_tool!(GetPaperBatchTool);
corpus_tool!(GetCitationsTool);
corpus_tool!(TitleSearchTool);
corpus_tool!(AuthorSearchTool);
corpus_tool!(AuthorPapersTool);

impl ToolHandler for SnippetSearchTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "snippet_search".into(),
            description: "Rank passage snippets from the corpus by lexical relevance to a query."
                .into(),
            params: vec![
                param("query", "search query", ParamType::String, true),
                param("limit", "maximum snippets returned", ParamType::Integer, false),
                param(
                    "paper_ids",
                    "restrict results to these corpus ids",
                    ParamType::Array,
                    false,
                ),
            ],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let restriction: Option<BTreeSet<String>> = match string_list_arg(args, "paper_ids")? {
            ids if ids.is_empty() && args.get("paper_ids").is_none() => None,
            ids => Some(ids.into_iter().collect()),
        };
        let result = self
            .0
            .corpus
            .snippet_search(
                &string_arg(args, "query"),
                limit_arg(args, 10),
                self.0.cutoff,
                restriction.as_ref(),
            )
            .map_err(map_corpus_error)?;
        Ok(serde_json::to_value(result).expect("snippets serialize"))
    }
}

impl ToolHandler for PaperRelevanceTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "search_papers_by_relevance".into(),
            description: "Rank whole papers by lexical relevance to a query.".into(),
            params: vec![
                param("query", "search query", ParamType::String, true),
                param("limit", "maximum papers returned", ParamType::Integer, false),
            ],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let papers = self
            .0
            .corpus
            .search_papers_by_relevance(&string_arg(args, "query"), limit_arg(args, 10), self.0.cutoff)
            .map_err(map_corpus_error)?;
        Ok(json!({ "papers": papers }))
    }
}

impl ToolHandler for GetPaperTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "get_paper".into(),
            description: "Fetch the requested fields of one paper by corpus id.".into(),
            params: vec![
                param("paper_id", "corpus id, raw or CorpusId-prefixed", ParamType::String, true),
                param("fields", "field names to include", ParamType::Array, true),
            ],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let fields = string_list_arg(args, "fields")?;
        let paper = self
            .0
            .corpus
            .get_paper(&string_arg(args, "paper_id"), &fields)
            .map_err(map_corpus_error)?;
        Ok(serde_json::to_value(paper).expect("paper serializes"))
    }
}

impl ToolHandler for GetPaperBatchTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "get_paper_batch".into(),
            description: "Fetch fields for several papers; per-id failures are reported inline."
                .into(),
            params: vec![
                param("paper_ids", "corpus ids to fetch", ParamType::Array, true),
                param("fields", "field names to include", ParamType::Array, true),
            ],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let ids = string_list_arg(args, "paper_ids")?;
        let fields = string_list_arg(args, "fields")?;
        let batch = self.0.corpus.get_paper_batch(&ids, &fields).map_err(map_corpus_error)?;
        let papers: Vec<Value> = batch
            .into_iter()
            .map(|(id, entry)| match entry {
                Ok(paper) => json!({ "id": id, "paper": paper }),
                Err(e) => json!({ "id": id, "error": e.to_string() }),
            })
            .collect();
        Ok(json!({ "papers": papers }))
    }
}

impl ToolHandler for GetCitationsTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "get_citations".into(),
            description: "List papers citing (forward) or cited by (backward) a paper.".into(),
            params: vec![
                param("paper_id", "corpus id", ParamType::String, true),
                param("direction", "\"forward\" or \"backward\"", ParamType::String, true),
            ],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let direction = match string_arg(args, "direction").as_str() {
            "forward" => Direction::Forward,
            "backward" => Direction::Backward,
            other => {
                return Err(ToolError::InvalidParams(format!(
                    "direction must be \"forward\" or \"backward\", got {other:?}"
                )))
            }
        };
        let papers = self
            .0
            .corpus
            .get_citations(&string_arg(args, "paper_id"), direction, self.0.cutoff)
            .map_err(map_corpus_error)?;
        Ok(json!({ "papers": papers }))
    }
}

impl ToolHandler for TitleSearchTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "search_paper_by_title".into(),
            description: "Find the paper whose title best matches, with a similarity score."
                .into(),
            params: vec![param("title", "title to look up", ParamType::String, true)],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let hit = self
            .0
            .corpus
            .search_paper_by_title(&string_arg(args, "title"))
            .map_err(map_corpus_error)?;
        Ok(json!({ "match": hit }))
    }
}

impl ToolHandler for AuthorSearchTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "search_authors_by_name".into(),
            description: "Case-insensitive substring search over author names.".into(),
            params: vec![param("name", "name fragment", ParamType::String, true)],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let authors: Vec<Value> = self
            .0
            .corpus
            .search_authors_by_name(&string_arg(args, "name"))
            .into_iter()
            .map(|(id, name)| json!({ "author_id": id, "name": name }))
            .collect();
        Ok(json!({ "authors": authors }))
    }
}

impl ToolHandler for AuthorPapersTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "get_author_papers".into(),
            description: "List an author's papers in the corpus.".into(),
            params: vec![param("author_id", "author id", ParamType::String, true)],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let papers = self
            .0
            .corpus
            .get_author_papers(&string_arg(args, "author_id"), self.0.cutoff)
            .map_err(map_corpus_error)?;
        Ok(json!({ "papers": papers }))
    }
}

/// Stateful code execution exposed as a tool. Cells naming the same session
/// share interpreter state; distinct sessions are isolated.
pub struct ExecutionTool {
    config: ExecConfig,
    sessions: Mutex<BTreeMap<String, ExecSession>>,
}

impl ExecutionTool {
    pub fn new(config: ExecConfig) -> Self {
        ExecutionTool { config, sessions: Mutex::new(BTreeMap::new()) }
    }
}

impl ToolHandler for ExecutionTool {
    fn descriptor(&self) -> ToolDescriptor {
        ToolDescriptor {
            name: "execute_code".into(),
            description:
                "Run a code cell in a persistent interpreter session; variables survive between calls."
                    .into(),
            params: vec![
                param("code", "source of the cell", ParamType::String, true),
                param("session", "session name (default \"default\")", ParamType::String, false),
            ],
        }
    }

    fn invoke(&self, args: &Value) -> Result<Value, ToolError> {
        let session_name = match args.get("session").and_then(Value::as_str) {
            Some(name) => name.to_string(),
            None => "default".to_string(),
        };
        let mut sessions = self.sessions.lock().expect("session pool lock");
        if !sessions.contains_key(&session_name) {
            let session = ExecSession::open(session_name.clone(), self.config.clone())
                .map_err(|e| ToolError::failed("exec", e.to_string()))?;
            sessions.insert(session_name.clone(), session);
        }
        let session = sessions.get_mut(&session_name).expect("just inserted");
        match session.execute(&string_arg(args, "code")) {
            Ok(result) => Ok(serde_json::to_value(result).expect("exec result serializes")),
            Err(e) => {
                // A crashed guest poisons only its own session.
                sessions.remove(&session_name);
                Err(ToolError::failed("exec", e.to_string()))
            }
        }
    }
}

/// The full served toolset: eight corpus tools plus code execution.
pub fn corpus_toolbox(
    corpus: Arc<Corpus>,
    cutoff: Option<DateCutoff>,
    exec: Option<ExecConfig>,
) -> Toolbox {
    let ctx = Arc::new(CorpusContext { corpus, cutoff });
    let mut toolbox = Toolbox::new();
    toolbox.register(Arc::new(SnippetSearchTool(ctx.clone())));
    toolbox.register(Arc::new(PaperRelevanceTool(ctx.clone())));
    toolbox.register(Arc::new(GetPaperTool(ctx.clone())));
    toolbox.register(Arc::new(GetPaperBatchTool(ctx.clone())));
    toolbox.register(Arc::new(GetCitationsTool(ctx.clone())));
    toolbox.register(Arc::new(TitleSearchTool(ctx.clone())));
    toolbox.register(Arc::new(AuthorSearchTool(ctx.clone())));
    toolbox.register(Arc::new(AuthorPapersTool(ctx)));
    if let Some(config) = exec {
        toolbox.register(Arc::new(ExecutionTool::new(config)));
    }
    toolbox
}

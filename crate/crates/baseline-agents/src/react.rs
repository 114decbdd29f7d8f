//! ReAct loop: chat, execute tool calls, append results, repeat until the
//! submit tool fires or the step limit is hit.

use model_gateway::{ChatTurn, Gateway, GatewayError, ToolDescriptor, ToolError, ToolParam, Toolbox};
use serde::{Deserialize, Serialize};

pub const DEFAULT_STEP_LIMIT: usize = 50;
pub const TOOL_RESULT_LIMIT_BYTES: usize = 16_384;
pub const SUBMIT_TOOL: &str = "submit";

const SYSTEM_PROMPT: &str = "You are a research assistant attempting to submit the correct \
answer to the task. Use the available tools, then call submit(answer) exactly once.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Submitted,
    StepLimit,
    Error,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transcript {
    pub turns: Vec<ChatTurn>,
    /// Usage-record call ids, one per model call (= per step).
    pub usage_ids: Vec<String>,
    pub answer: Option<String>,
    pub termination: Termination,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Transcript {
    pub fn steps(&self) -> usize {
        self.usage_ids.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReactLimits {
    pub step_limit: usize,
    pub tool_result_limit_bytes: usize,
}

impl Default for ReactLimits {
    fn default() -> Self {
        ReactLimits {
            step_limit: DEFAULT_STEP_LIMIT,
            tool_result_limit_bytes: TOOL_RESULT_LIMIT_BYTES,
        }
    }
}

fn submit_descriptor() -> ToolDescriptor {
    ToolDescriptor {
        name: SUBMIT_TOOL.into(),
        description: "Submit the final answer and stop.".into(),
        params: vec![ToolParam {
            name: "answer".into(),
            description: "the final answer".into(),
            param_type: model_gateway::ParamType::String,
            required: true,
        }],
    }
}

/// Truncates to at most `limit` bytes on a char boundary. Idempotent.
pub fn truncate_tool_output(text: &str, limit: usize) -> String {
    if text.len() <= limit {
        return text.to_string();
    }
    let mut cut = limit;
    while cut > 0 && !text.is_char_boundary(cut) {
        cut -= 1;
    }
    text[..cut].to_string()
}

/// Runs the loop. The submit tool is appended to the advertised tool list;
/// every other call dispatches into `tools`, with failures rendered as tool
/// results so the loop continues.
pub fn react_run(
    gateway: &Gateway,
    task_id: &str,
    task_input: &str,
    tools: &Toolbox,
    limits: ReactLimits,
) -> Transcript {
    let mut descriptors = tools.descriptors();
    descriptors.push(submit_descriptor());

    let mut turns = vec![ChatTurn::system(SYSTEM_PROMPT), ChatTurn::user(task_input)];
    let mut usage_ids = Vec::new();

    for _ in 0..limits.step_limit {
        let (assistant, usage) = match gateway.chat(task_id, &turns, &descriptors) {
            Ok(ok) => ok,
            Err(e) => {
                return Transcript {
                    turns,
                    usage_ids,
                    answer: None,
                    termination: Termination::Error,
                    error: Some(render_error(e)),
                }
            }
        };
        usage_ids.push(usage.call_id.clone());
        turns.push(assistant.clone());

        for call in &assistant.tool_calls {
            if call.name == SUBMIT_TOOL {
                let answer = call
                    .arguments
                    .get("answer")
                    .and_then(serde_json::Value::as_str)
                    .unwrap_or_default()
                    .to_string();
                return Transcript {
                    turns,
                    usage_ids,
                    answer: Some(answer),
                    termination: Termination::Submitted,
                    error: None,
                };
            }
            let rendered = match tools.invoke(&call.name, &call.arguments) {
                Ok(value) => value.to_string(),
                Err(e) => render_tool_error(&e),
            };
            let truncated = truncate_tool_output(&rendered, limits.tool_result_limit_bytes);
            turns.push(ChatTurn::tool_result(&call.id, truncated));
        }
    }

    Transcript { turns, usage_ids, answer: None, termination: Termination::StepLimit, error: None }
}

fn render_error(e: GatewayError) -> String {
    format!("model call failed: {e}")
}

fn render_tool_error(e: &ToolError) -> String {
    format!("tool error: {e}")
}

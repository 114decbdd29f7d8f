//! Deterministic scripted model for tests and reproducible runs.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::types::{ChatTurn, ToolCall, ToolDescriptor, Usage};
use crate::{ChatModel, GatewayError};

/// Guard deciding whether a script rule applies to the current call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matcher {
    /// Applies unconditionally.
    Any,
    /// Applies when the most recent turn's content contains the needle.
    Contains(String),
}

impl Matcher {
    fn matches(&self, history: &[ChatTurn]) -> bool {
        match self {
            Matcher::Any => true,
            Matcher::Contains(needle) => history
                .last()
                .map(|turn| turn.content.contains(needle.as_str()))
                .unwrap_or(false),
        }
    }
}

/// The assistant turn a rule produces. When `usage` is absent, token counts
/// fall back to whitespace-token counting over the history and the content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedResponse {
    pub content: String,
    #[serde(default)]
    pub tool_calls: Vec<ScriptedToolCall>,
    #[serde(default)]
    pub usage: Option<Usage>,
}

impl ScriptedResponse {
    pub fn text(content: impl Into<String>) -> Self {
        ScriptedResponse { content: content.into(), tool_calls: vec![], usage: None }
    }

    pub fn with_tool_call(mut self, name: impl Into<String>, arguments: serde_json::Value) -> Self {
        self.tool_calls.push(ScriptedToolCall { name: name.into(), arguments });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedToolCall {
    pub name: String,
    pub arguments: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptRule {
    pub matcher: Matcher,
    pub response: ScriptedResponse,
}

/// Plays back an ordered script of responses. Each call consumes the next
/// rule; a rule whose matcher does not apply is a scripted gap and errors.
/// Two instances never share state.
pub struct ScriptedModel {
    model_id: String,
    script: Vec<ScriptRule>,
    cursor: Mutex<usize>,
}

impl ScriptedModel {
    pub fn new(model_id: impl Into<String>, script: Vec<ScriptRule>) -> Self {
        ScriptedModel { model_id: model_id.into(), script, cursor: Mutex::new(0) }
    }

    /// Load a script from a JSON file: `{"model_id": ..., "rules": [...]}`.
    pub fn from_file(path: &std::path::Path) -> std::io::Result<Self> {
        #[derive(Deserialize)]
        struct ScriptFile {
            model_id: String,
            rules: Vec<ScriptRule>,
        }
        let file: ScriptFile = serde_json::from_reader(std::fs::File::open(path)?)?;
        Ok(ScriptedModel::new(file.model_id, file.rules))
    }

    pub fn calls_made(&self) -> usize {
        *self.cursor.lock().unwrap()
    }

    pub fn model_id_owned(&self) -> String {
        self.model_id.clone()
    }

    /// Consumes the model and hands back its script, e.g. to replay it
    /// through fresh instances.
    pub fn into_rules(self) -> Vec<ScriptRule> {
        self.script
    }
}

fn whitespace_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

impl ChatModel for ScriptedModel {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn chat(&self, history: &[ChatTurn], _tools: &[ToolDescriptor]) -> Result<(ChatTurn, Usage), GatewayError> {
        let mut cursor = self.cursor.lock().unwrap();
        let index = *cursor;
        let rule = self.script.get(index).ok_or(GatewayError::ScriptedGap(index))?;
        if !rule.matcher.matches(history) {
            return Err(GatewayError::ScriptedGap(index));
        }
        *cursor += 1;

        let usage = rule.response.usage.unwrap_or_else(|| Usage {
            input_tokens: history.iter().map(|t| whitespace_tokens(&t.content)).sum(),
            output_tokens: whitespace_tokens(&rule.response.content),
            cache_read_tokens: 0,
            cache_write_tokens: 0,
        });
        let mut turn = ChatTurn::assistant(rule.response.content.clone());
        turn.tool_calls = rule
            .response
            .tool_calls
            .iter()
            .enumerate()
            .map(|(i, call)| ToolCall {
                id: format!("tc-{index}-{i}"),
                name: call.name.clone(),
                arguments: call.arguments.clone(),
            })
            .collect();
        Ok((turn, usage))
    }
}

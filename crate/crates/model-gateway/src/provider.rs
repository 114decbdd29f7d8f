//! Codec for OpenAI-style chat-completion endpoints.
//!
//! The HTTP transport is injectable so the request/response handling and
//! error taxonomy are testable without network access; production callers
//! supply a transport backed by their HTTP client of choice.

use serde::Deserialize;
use serde_json::json;

use crate::types::{ChatTurn, Role, ToolCall, ToolDescriptor, Usage};
use crate::{ChatModel, GatewayError};

/// Endpoint configuration. The credential is named by environment variable,
/// never stored inline.
#[derive(Debug, Clone)]
pub struct ProviderConfig {
    pub url: String,
    pub model: String,
    pub api_key_env: String,
}

/// Minimal HTTP surface the provider needs.
pub trait HttpTransport: Send + Sync {
    fn post(&self, url: &str, headers: &[(String, String)], body: &str) -> Result<(u16, String), String>;
}

pub struct HttpProvider<T: HttpTransport> {
    config: ProviderConfig,
    transport: T,
}

impl<T: HttpTransport> HttpProvider<T> {
    pub fn new(config: ProviderConfig, transport: T) -> Self {
        HttpProvider { config, transport }
    }

    fn request_body(&self, history: &[ChatTurn], tools: &[ToolDescriptor]) -> String {
        let messages: Vec<serde_json::Value> = history
            .iter()
            .map(|turn| {
                let role = match turn.role {
                    Role::System => "system",
                    Role::User => "user",
                    Role::Assistant => "assistant",
                    Role::Tool => "tool",
                };
                let mut msg = json!({ "role": role, "content": turn.content });
                if !turn.tool_calls.is_empty() {
                    msg["tool_calls"] = turn
                        .tool_calls
                        .iter()
                        .map(|c| {
                            json!({
                                "id": c.id,
                                "type": "function",
                                "function": {
                                    "name": c.name,
                                    "arguments": c.arguments.to_string(),
                                },
                            })
                        })
                        .collect();
                }
                if let Some(id) = &turn.tool_call_id {
                    msg["tool_call_id"] = json!(id);
                }
                msg
            })
            .collect();
        let tool_schemas: Vec<serde_json::Value> = tools
            .iter()
            .map(|t| {
                let properties: serde_json::Map<String, serde_json::Value> = t
                    .params
                    .iter()
                    .map(|p| {
                        let ty = match p.param_type {
                            crate::types::ParamType::String => "string",
                            crate::types::ParamType::Integer => "integer",
                            crate::types::ParamType::Number => "number",
                            crate::types::ParamType::Boolean => "boolean",
                            crate::types::ParamType::Array => "array",
                            crate::types::ParamType::Object => "object",
                        };
                        (p.name.clone(), json!({ "type": ty, "description": p.description }))
                    })
                    .collect();
                let required: Vec<&str> =
                    t.params.iter().filter(|p| p.required).map(|p| p.name.as_str()).collect();
                json!({
                    "type": "function",
                    "function": {
                        "name": t.name,
                        "description": t.description,
                        "parameters": {
                            "type": "object",
                            "properties": properties,
                            "required": required,
                        },
                    },
                })
            })
            .collect();
        let mut body = json!({ "model": self.config.model, "messages": messages });
        if !tool_schemas.is_empty() {
            body["tools"] = json!(tool_schemas);
        }
        body.to_string()
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    #[serde(default)]
    content: Option<String>,
    #[serde(default)]
    tool_calls: Vec<WireToolCall>,
}

#[derive(Deserialize)]
struct WireToolCall {
    id: String,
    function: WireFunction,
}

#[derive(Deserialize)]
struct WireFunction {
    name: String,
    arguments: String,
}

#[derive(Deserialize)]
struct WireUsage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
    #[serde(default)]
    prompt_tokens_details: Option<WirePromptDetails>,
}

#[derive(Deserialize)]
struct WirePromptDetails {
    #[serde(default)]
    cached_tokens: u64,
}

impl<T: HttpTransport> ChatModel for HttpProvider<T> {
    fn model_id(&self) -> &str {
        &self.config.model
    }

    fn chat(&self, history: &[ChatTurn], tools: &[ToolDescriptor]) -> Result<(ChatTurn, Usage), GatewayError> {
        let key = std::env::var(&self.config.api_key_env).unwrap_or_default();
        let headers = vec![
            ("Authorization".to_string(), format!("Bearer {key}")),
            ("Content-Type".to_string(), "application/json".to_string()),
        ];
        let body = self.request_body(history, tools);
        let (status, response) = self
            .transport
            .post(&self.config.url, &headers, &body)
            .map_err(|message| GatewayError::Transport { retryable: true, message })?;

        match status {
            200 => {}
            413 => return Err(GatewayError::ContextLength(self.config.model.clone())),
            429 | 500..=599 => {
                return Err(GatewayError::Transport {
                    retryable: true,
                    message: format!("status {status}"),
                })
            }
            _ => {
                // Context overflows surface as 400s with a marker string.
                if response.contains("context_length_exceeded") {
                    return Err(GatewayError::ContextLength(self.config.model.clone()));
                }
                return Err(GatewayError::Transport {
                    retryable: false,
                    message: format!("status {status}: {response}"),
                });
            }
        }

        let wire: WireResponse = serde_json::from_str(&response)
            .map_err(|e| GatewayError::MalformedResponse(e.to_string()))?;
        let choice = wire
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| GatewayError::MalformedResponse("no choices".into()))?;

        let mut turn = ChatTurn::assistant(choice.message.content.unwrap_or_default());
        turn.tool_calls = choice
            .message
            .tool_calls
            .into_iter()
            .map(|c| {
                let arguments = serde_json::from_str(&c.function.arguments)
                    .unwrap_or(serde_json::Value::Null);
                ToolCall { id: c.id, name: c.function.name, arguments }
            })
            .collect();

        let usage = wire
            .usage
            .map(|u| Usage {
                input_tokens: u.prompt_tokens,
                output_tokens: u.completion_tokens,
                cache_read_tokens: u.prompt_tokens_details.map(|d| d.cached_tokens).unwrap_or(0),
                cache_write_tokens: 0,
            })
            .unwrap_or_default();
        Ok((turn, usage))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct CannedTransport {
        status: u16,
        body: String,
    }

    impl HttpTransport for CannedTransport {
        fn post(&self, _: &str, _: &[(String, String)], _: &str) -> Result<(u16, String), String> {
            Ok((self.status, self.body.clone()))
        }
    }

    fn provider(status: u16, body: &str) -> HttpProvider<CannedTransport> {
        HttpProvider::new(
            ProviderConfig {
                url: "http://localhost/v1/chat".into(),
                model: "test-model".into(),
                api_key_env: "NO_SUCH_ENV_VAR".into(),
            },
            CannedTransport { status, body: body.into() },
        )
    }

    #[test]
    fn parses_content_tool_calls_and_usage() {
        let body = r#"{
            "choices": [{"message": {"content": "hi", "tool_calls": [
                {"id": "c1", "function": {"name": "submit", "arguments": "{\"answer\": \"42\"}"}}
            ]}}],
            "usage": {"prompt_tokens": 10, "completion_tokens": 5,
                      "prompt_tokens_details": {"cached_tokens": 4}}
        }"#;
        let (turn, usage) = provider(200, body).chat(&[ChatTurn::user("q")], &[]).unwrap();
        assert_eq!(turn.content, "hi");
        assert_eq!(turn.tool_calls[0].name, "submit");
        assert_eq!(turn.tool_calls[0].arguments["answer"], "42");
        assert_eq!(usage, Usage { input_tokens: 10, output_tokens: 5, cache_read_tokens: 4, cache_write_tokens: 0 });
    }

    #[test]
    fn rate_limit_is_retryable() {
        let err = provider(429, "slow down").chat(&[ChatTurn::user("q")], &[]).unwrap_err();
        assert!(matches!(err, GatewayError::Transport { retryable: true, .. }));
    }

    #[test]
    fn context_overflow_is_not_retryable() {
        let err = provider(400, r#"{"error": {"code": "context_length_exceeded"}}"#)
            .chat(&[ChatTurn::user("q")], &[])
            .unwrap_err();
        assert!(matches!(err, GatewayError::ContextLength(_)));
    }

    #[test]
    fn malformed_body_is_reported() {
        let err = provider(200, "not json").chat(&[ChatTurn::user("q")], &[]).unwrap_err();
        assert!(matches!(err, GatewayError::MalformedResponse(_)));
    }
}

//! Uniform chat-model interface: neutral chat turns with native tool calls,
//! an append-only usage log, a deterministic scripted mock for tests, and a
//! provider codec for OpenAI-style HTTP endpoints.

pub mod log;
pub mod mock;
pub mod provider;
pub mod toolbox;
mod types;

pub use log::UsageLog;
pub use mock::{Matcher, ScriptedModel, ScriptedResponse, ScriptRule};
pub use toolbox::{ToolError, ToolHandler, Toolbox};
pub use types::{ChatTurn, ParamType, Role, ToolCall, ToolDescriptor, ToolParam, Usage, UsageRecord};

use std::sync::Arc;

/// Errors from model calls.
#[derive(Debug, Clone, thiserror::Error)]
pub enum GatewayError {
    #[error("transport failure (retryable={retryable}): {message}")]
    Transport { retryable: bool, message: String },
    #[error("context length exceeded for model {0}")]
    ContextLength(String),
    #[error("no scripted response matches call {0}")]
    ScriptedGap(usize),
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("history must start with a system or user turn")]
    BadHistory,
}

/// A chat model returning one assistant turn plus its token usage.
pub trait ChatModel: Send + Sync {
    fn model_id(&self) -> &str;
    fn chat(&self, history: &[ChatTurn], tools: &[ToolDescriptor]) -> Result<(ChatTurn, Usage), GatewayError>;
}

/// Wraps a model with usage logging and retry policy. Every attempt appends
/// exactly one [`UsageRecord`] to the log, including retried ones.
pub struct Gateway {
    model: Arc<dyn ChatModel>,
    log: Arc<UsageLog>,
    max_retries: usize,
}

impl Gateway {
    pub fn new(model: Arc<dyn ChatModel>, log: Arc<UsageLog>) -> Self {
        Gateway { model, log, max_retries: 2 }
    }

    pub fn log(&self) -> &Arc<UsageLog> {
        &self.log
    }

    pub fn model_id(&self) -> &str {
        self.model.model_id()
    }

    pub fn chat(
        &self,
        task_id: &str,
        history: &[ChatTurn],
        tools: &[ToolDescriptor],
    ) -> Result<(ChatTurn, UsageRecord), GatewayError> {
        match history.first().map(|t| t.role) {
            Some(Role::System) | Some(Role::User) => {}
            _ => return Err(GatewayError::BadHistory),
        }
        let mut attempt = 0;
        loop {
            match self.model.chat(history, tools) {
                Ok((turn, usage)) => {
                    let record = self.log.append(self.model.model_id(), task_id, usage);
                    return Ok((turn, record));
                }
                Err(GatewayError::Transport { retryable: true, message }) if attempt < self.max_retries => {
                    // A failed attempt may still have been billed; log it.
                    self.log.append(self.model.model_id(), task_id, Usage::default());
                    let _ = message;
                    attempt += 1;
                }
                Err(err) => return Err(err),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct FlakyModel {
        failures: AtomicUsize,
    }

    impl ChatModel for FlakyModel {
        fn model_id(&self) -> &str {
            "flaky"
        }
        fn chat(&self, _: &[ChatTurn], _: &[ToolDescriptor]) -> Result<(ChatTurn, Usage), GatewayError> {
            if self.failures.fetch_update(Ordering::SeqCst, Ordering::SeqCst, |f| f.checked_sub(1)).is_ok() {
                Err(GatewayError::Transport { retryable: true, message: "reset".into() })
            } else {
                Ok((ChatTurn::assistant("ok"), Usage { input_tokens: 1, output_tokens: 1, ..Default::default() }))
            }
        }
    }

    #[test]
    fn retries_are_each_logged() {
        let log = Arc::new(UsageLog::new());
        let gw = Gateway::new(Arc::new(FlakyModel { failures: AtomicUsize::new(2) }), log.clone());
        let (turn, _) = gw.chat("t1", &[ChatTurn::user("hi")], &[]).unwrap();
        assert_eq!(turn.content, "ok");
        assert_eq!(log.records().len(), 3); // 2 failed attempts + 1 success
    }

    #[test]
    fn gives_up_after_two_retries() {
        let log = Arc::new(UsageLog::new());
        let gw = Gateway::new(Arc::new(FlakyModel { failures: AtomicUsize::new(10) }), log.clone());
        assert!(gw.chat("t1", &[ChatTurn::user("hi")], &[]).is_err());
        assert_eq!(log.records().len(), 2);
    }

    #[test]
    fn rejects_history_not_starting_with_system_or_user() {
        let log = Arc::new(UsageLog::new());
        let gw = Gateway::new(Arc::new(FlakyModel { failures: AtomicUsize::new(0) }), log);
        let err = gw.chat("t", &[ChatTurn::assistant("x")], &[]).unwrap_err();
        assert!(matches!(err, GatewayError::BadHistory));
    }
}

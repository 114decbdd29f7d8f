//! Line-delimited request/response framing for tool listing and invocation.
//!
//! Two methods are supported: `tools/list` and `tools/call`. Errors carry a
//! numeric code from the conventional taxonomy; tool-level failures are not
//! protocol errors and travel inside a successful response instead, tagged
//! with `is_error` and the originating category.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;
pub const INTERNAL_ERROR: i64 = -32603;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Request {
    pub id: Value,
    pub method: String,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorObject {
    pub code: i64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Response {
    pub id: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorObject>,
}

impl Response {
    pub fn ok(id: Value, result: Value) -> Self {
        Response { id, result: Some(result), error: None }
    }

    pub fn fail(id: Value, code: i64, message: impl Into<String>) -> Self {
        Response { id, result: None, error: Some(ErrorObject { code, message: message.into() }) }
    }
}

impl Request {
    pub fn list(id: impl Into<Value>) -> Self {
        Request { id: id.into(), method: "tools/list".into(), params: Value::Null }
    }

    pub fn call(id: impl Into<Value>, tool: &str, arguments: Value) -> Self {
        Request {
            id: id.into(),
            method: "tools/call".into(),
            params: serde_json::json!({ "name": tool, "arguments": arguments }),
        }
    }
}

//! Tool registry with schema-validated invocation.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::types::{ToolDescriptor, ToolParam};

/// Tool-level failures, carried with their category so callers (agents,
/// wire services) can pass them through without flattening.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ToolError {
    #[error("unknown tool: {0}")]
    NotFound(String),
    #[error("invalid params: {0}")]
    InvalidParams(String),
    #[error("{category}: {message}")]
    Failed { category: String, message: String },
}

impl ToolError {
    pub fn failed(category: impl Into<String>, message: impl Into<String>) -> Self {
        ToolError::Failed { category: category.into(), message: message.into() }
    }
}

/// One invokable tool.
pub trait ToolHandler: Send + Sync {
    fn descriptor(&self) -> ToolDescriptor;
    fn invoke(&self, args: &serde_json::Value) -> Result<serde_json::Value, ToolError>;
}

/// A named set of tools; validates arguments against the descriptor schema
/// before dispatching.
#[derive(Default, Clone)]
pub struct Toolbox {
    tools: BTreeMap<String, Arc<dyn ToolHandler>>,
}

impl Toolbox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, tool: Arc<dyn ToolHandler>) {
        self.tools.insert(tool.descriptor().name, tool);
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    pub fn descriptors(&self) -> Vec<ToolDescriptor> {
        self.tools.values().map(|t| t.descriptor()).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tools.contains_key(name)
    }

    /// New toolbox holding only the named tools. Names that are not
    /// registered are dropped silently; callers that care should check
    /// `contains` first.
    pub fn restricted(&self, names: &[String]) -> Toolbox {
        let tools = self
            .tools
            .iter()
            .filter(|(name, _)| names.iter().any(|n| n == *name))
            .map(|(name, tool)| (name.clone(), Arc::clone(tool)))
            .collect();
        Toolbox { tools }
    }

    pub fn invoke(&self, name: &str, args: &serde_json::Value) -> Result<serde_json::Value, ToolError> {
        let tool = self.tools.get(name).ok_or_else(|| ToolError::NotFound(name.to_string()))?;
        let descriptor = tool.descriptor();
        validate_args(&descriptor.params, args)?;
        tool.invoke(args)
    }
}

fn validate_args(params: &[ToolParam], args: &serde_json::Value) -> Result<(), ToolError> {
    let map = args
        .as_object()
        .ok_or_else(|| ToolError::InvalidParams("arguments must be an object".into()))?;
    for param in params {
        match map.get(&param.name) {
            Some(value) if value.is_null() && !param.required => {}
            Some(value) => {
                if !param.param_type.matches(value) {
                    return Err(ToolError::InvalidParams(format!(
                        "parameter {} must be of type {:?}",
                        param.name, param.param_type
                    )));
                }
            }
            None if param.required => {
                return Err(ToolError::InvalidParams(format!(
                    "missing required parameter {}",
                    param.name
                )));
            }
            None => {}
        }
    }
    for key in map.keys() {
        if !params.iter().any(|p| &p.name == key) {
            return Err(ToolError::InvalidParams(format!("unexpected parameter {key}")));
        }
    }
    Ok(())
}

//! Submission metadata and the closed tag taxonomies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How reproducible the submitted agent is: both code and weights open,
/// open code over proprietary models, API-only, or UI-only access.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Openness {
    #[serde(rename = "open-source open-weight")]
    OpenSourceOpenWeight,
    #[serde(rename = "open-source closed-weight")]
    OpenSourceClosedWeight,
    #[serde(rename = "closed API")]
    ClosedApi,
    #[serde(rename = "closed UI-only")]
    ClosedUiOnly,
}

/// Whether the agent used only the predefined environment tools, a custom
/// interface over them, or a fully custom stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tooling {
    Standard,
    CustomInterface,
    FullyCustom,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TagError {
    #[error("missing required tag `{0}`")]
    Missing(&'static str),
    #[error("unknown {field} tag `{value}`")]
    Unknown { field: &'static str, value: String },
}

/// Raw submission metadata as it arrives in a bundle; tags are free text
/// until validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionMeta {
    pub agent: String,
    #[serde(default)]
    pub openness: Option<String>,
    #[serde(default)]
    pub tooling: Option<String>,
    #[serde(default)]
    pub models: Vec<String>,
    /// Caller-supplied wall time; the store never consults a clock, so
    /// renders stay reproducible.
    pub submitted_at: String,
    /// sha256 hex of the report file bytes, declared by the submitter and
    /// re-verified on submit.
    pub report_digest: String,
}

fn parse_tag<T: serde::de::DeserializeOwned>(field: &'static str, value: &str) -> Result<T, TagError> {
    serde_json::from_value(serde_json::Value::String(value.to_string()))
        .map_err(|_| TagError::Unknown { field, value: value.to_string() })
}

/// Validate the free-text tags against the closed taxonomies.
pub fn classify_submission(meta: &SubmissionMeta) -> Result<(Openness, Tooling), TagError> {
    let openness = meta.openness.as_deref().ok_or(TagError::Missing("openness"))?;
    let tooling = meta.tooling.as_deref().ok_or(TagError::Missing("tooling"))?;
    Ok((parse_tag("openness", openness)?, parse_tag("tooling", tooling)?))
}

impl Openness {
    pub fn label(self) -> &'static str {
        match self {
            Openness::OpenSourceOpenWeight => "open-source open-weight",
            Openness::OpenSourceClosedWeight => "open-source closed-weight",
            Openness::ClosedApi => "closed API",
            Openness::ClosedUiOnly => "closed UI-only",
        }
    }
}

impl Tooling {
    pub fn label(self) -> &'static str {
        match self {
            Tooling::Standard => "standard",
            Tooling::CustomInterface => "custom-interface",
            Tooling::FullyCustom => "fully-custom",
        }
    }
}

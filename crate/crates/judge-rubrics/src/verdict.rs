//! Verdict kinds and their grade scales.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    ClaimSupport,
    ParagraphRelevance,
    IngredientCoverage,
    StatementEntailment,
    HypothesisFacet,
    RubricItem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportLevel {
    Full,
    Partial,
    None,
}

/// A grade on the scale of its kind. `Invalid` records judge output that
/// could not be parsed; it is never silently dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "kebab-case")]
pub enum Grade {
    ClaimSupport { level: SupportLevel, quote_present: bool },
    ParagraphRelevance { relevant: bool },
    IngredientCoverage { points: u8 },
    StatementEntailment { entailed: bool },
    HypothesisFacet { score: f64 },
    RubricItem { supported: bool },
    Invalid { raw: String },
}

impl Grade {
    /// The kind this grade belongs to, when valid.
    pub fn kind(&self) -> Option<VerdictKind> {
        match self {
            Grade::ClaimSupport { .. } => Some(VerdictKind::ClaimSupport),
            Grade::ParagraphRelevance { .. } => Some(VerdictKind::ParagraphRelevance),
            Grade::IngredientCoverage { .. } => Some(VerdictKind::IngredientCoverage),
            Grade::StatementEntailment { .. } => Some(VerdictKind::StatementEntailment),
            Grade::HypothesisFacet { .. } => Some(VerdictKind::HypothesisFacet),
            Grade::RubricItem { .. } => Some(VerdictKind::RubricItem),
            Grade::Invalid { .. } => None,
        }
    }

    pub fn in_scale(&self) -> bool {
        match self {
            Grade::IngredientCoverage { points } => *points <= 2,
            Grade::HypothesisFacet { score } => (0.0..=1.0).contains(score),
            _ => true,
        }
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, Grade::Invalid { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub kind: VerdictKind,
    pub target_id: String,
    pub grade: Grade,
    pub rationale: String,
}

/// One question put to a judge: what to grade (kind + target) and the
/// material to grade it on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeRequest {
    pub kind: VerdictKind,
    pub target_id: String,
    pub material: String,
}

/// Parses a judge's raw reply on the scale of `kind`; anything that does
/// not fit the scale becomes `Invalid` carrying the raw text.
pub fn parse_grade(kind: VerdictKind, raw: &str) -> Grade {
    let text = raw.trim().to_lowercase();
    let invalid = || Grade::Invalid { raw: raw.to_string() };
    match kind {
        VerdictKind::ClaimSupport => {
            let quote_present = text.contains("quote");
            match text.split_whitespace().next() {
                Some("full") => Grade::ClaimSupport { level: SupportLevel::Full, quote_present },
                Some("partial") => {
                    Grade::ClaimSupport { level: SupportLevel::Partial, quote_present }
                }
                Some("none") => Grade::ClaimSupport { level: SupportLevel::None, quote_present },
                _ => invalid(),
            }
        }
        VerdictKind::ParagraphRelevance => match text.as_str() {
            "relevant" | "true" | "yes" => Grade::ParagraphRelevance { relevant: true },
            "irrelevant" | "false" | "no" => Grade::ParagraphRelevance { relevant: false },
            _ => invalid(),
        },
        VerdictKind::IngredientCoverage => match text.as_str() {
            "0" => Grade::IngredientCoverage { points: 0 },
            "1" => Grade::IngredientCoverage { points: 1 },
            "2" => Grade::IngredientCoverage { points: 2 },
            _ => invalid(),
        },
        VerdictKind::StatementEntailment => match text.as_str() {
            "entailed" | "true" | "yes" => Grade::StatementEntailment { entailed: true },
            "not-entailed" | "false" | "no" => Grade::StatementEntailment { entailed: false },
            _ => invalid(),
        },
        VerdictKind::HypothesisFacet => match text.parse::<f64>() {
            Ok(score) if (0.0..=1.0).contains(&score) => Grade::HypothesisFacet { score },
            _ => invalid(),
        },
        VerdictKind::RubricItem => match text.as_str() {
            "supported" | "true" | "yes" => Grade::RubricItem { supported: true },
            "unsupported" | "false" | "no" => Grade::RubricItem { supported: false },
            _ => invalid(),
        },
    }
}

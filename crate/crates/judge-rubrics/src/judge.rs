//! The judge interface plus two implementations: a fully scripted judge for
//! tests and a model-backed judge whose prompts and identity come from
//! configuration.

use std::collections::BTreeMap;
use std::sync::Arc;

use model_gateway::{ChatModel, ChatTurn};
use serde::{Deserialize, Serialize};

use crate::rubric::{Importance, IngredientCandidate};
use crate::verdict::{parse_grade, Grade, JudgeRequest, JudgeVerdict, VerdictKind};

pub trait Judge: Send + Sync {
    /// One verdict per request, order-aligned. Unparseable judge output
    /// yields an `Invalid` grade in place, never a dropped request.
    fn judge(&self, batch: &[JudgeRequest]) -> Vec<JudgeVerdict>;

    /// Key-ingredient candidates extracted from one system answer.
    fn extract_ingredients(&self, answer: &str) -> Vec<IngredientCandidate>;
}

pub fn invalid_verdict_count(verdicts: &[JudgeVerdict]) -> usize {
    verdicts.iter().filter(|v| v.grade.is_invalid()).count()
}

/// Raw replies keyed by (kind, target id); extraction rules matched by
/// substring against the answer, first hit wins.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct JudgeScript {
    pub replies: BTreeMap<String, String>,
    pub extractions: Vec<ExtractionRule>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionRule {
    pub answer_contains: String,
    pub candidates: Vec<IngredientCandidate>,
}

fn reply_key(kind: VerdictKind, target_id: &str) -> String {
    format!("{}:{target_id}", serde_json::to_value(kind).unwrap().as_str().unwrap())
}

#[derive(Debug, Clone, Default)]
pub struct ScriptedJudge {
    script: JudgeScript,
}

impl ScriptedJudge {
    pub fn new(script: JudgeScript) -> Self {
        ScriptedJudge { script }
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        let script = serde_json::from_str(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        Ok(ScriptedJudge { script })
    }

    pub fn with_reply(mut self, kind: VerdictKind, target_id: &str, raw: &str) -> Self {
        self.script.replies.insert(reply_key(kind, target_id), raw.to_string());
        self
    }

    pub fn with_extraction(mut self, answer_contains: &str, candidates: Vec<IngredientCandidate>) -> Self {
        self.script
            .extractions
            .push(ExtractionRule { answer_contains: answer_contains.into(), candidates });
        self
    }
}

impl Judge for ScriptedJudge {
    fn judge(&self, batch: &[JudgeRequest]) -> Vec<JudgeVerdict> {
        batch
            .iter()
            .map(|request| {
                let grade = match self.script.replies.get(&reply_key(request.kind, &request.target_id)) {
                    Some(raw) => parse_grade(request.kind, raw),
                    None => Grade::Invalid { raw: "no scripted reply".into() },
                };
                JudgeVerdict {
                    kind: request.kind,
                    target_id: request.target_id.clone(),
                    grade,
                    rationale: "scripted".into(),
                }
            })
            .collect()
    }

    fn extract_ingredients(&self, answer: &str) -> Vec<IngredientCandidate> {
        if answer.trim().is_empty() {
            return vec![];
        }
        self.script
            .extractions
            .iter()
            .find(|rule| answer.contains(&rule.answer_contains))
            .map(|rule| rule.candidates.clone())
            .unwrap_or_default()
    }
}

/// Judge configuration pinned per run and echoed into reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgeConfig {
    pub system_prompt: String,
    pub temperature: f64,
}

impl Default for JudgeConfig {
    fn default() -> Self {
        JudgeConfig {
            system_prompt: "Grade the material on the requested scale. Reply with the grade only."
                .into(),
            temperature: 0.0,
        }
    }
}

/// Model-backed judge: one chat call per request, replies parsed on the
/// request's scale. Extraction expects one `critical: ...` or
/// `valuable: ...` line per candidate.
pub struct ModelJudge {
    model: Arc<dyn ChatModel>,
    pub config: JudgeConfig,
}

impl ModelJudge {
    pub fn new(model: Arc<dyn ChatModel>, config: JudgeConfig) -> Self {
        ModelJudge { model, config }
    }

    pub fn model_id(&self) -> &str {
        self.model.model_id()
    }
}

pub fn parse_ingredient_lines(text: &str) -> Vec<IngredientCandidate> {
    text.lines()
        .filter_map(|line| {
            let line = line.trim().trim_start_matches('-').trim();
            let (label, statement) = line.split_once(':')?;
            let importance = match label.trim().to_lowercase().as_str() {
                "critical" | "answer-critical" => Importance::AnswerCritical,
                "valuable" => Importance::Valuable,
                _ => return None,
            };
            let statement = statement.trim();
            (!statement.is_empty()).then(|| IngredientCandidate {
                statement: statement.to_string(),
                importance,
            })
        })
        .collect()
}

impl Judge for ModelJudge {
    fn judge(&self, batch: &[JudgeRequest]) -> Vec<JudgeVerdict> {
        batch
            .iter()
            .map(|request| {
                let history = [
                    ChatTurn::system(&self.config.system_prompt),
                    ChatTurn::user(&format!(
                        "kind: {}\ntarget: {}\n\n{}",
                        serde_json::to_value(request.kind).unwrap().as_str().unwrap(),
                        request.target_id,
                        request.material
                    )),
                ];
                let grade = match self.model.chat(&history, &[]) {
                    Ok((turn, _)) => parse_grade(request.kind, &turn.content),
                    Err(e) => Grade::Invalid { raw: e.to_string() },
                };
                JudgeVerdict {
                    kind: request.kind,
                    target_id: request.target_id.clone(),
                    grade,
                    rationale: "model-judged".into(),
                }
            })
            .collect()
    }

    fn extract_ingredients(&self, answer: &str) -> Vec<IngredientCandidate> {
        if answer.trim().is_empty() {
            return vec![];
        }
        let history = [
            ChatTurn::system(
                "Extract the key ingredients of this answer, one per line, as \
                 `critical: <statement>` or `valuable: <statement>`.",
            ),
            ChatTurn::user(answer),
        ];
        match self.model.chat(&history, &[]) {
            Ok((turn, _)) => parse_ingredient_lines(&turn.content),
            Err(_) => vec![],
        }
    }
}

//! Pluggable judge interface producing structured verdicts, plus the
//! ingredient-rubric construction pipeline. Ships a deterministic scripted
//! judge for tests; metric formulas downstream never depend on which judge
//! produced the verdicts.

pub mod judge;
pub mod rubric;
pub mod verdict;

pub use judge::{
    invalid_verdict_count, parse_ingredient_lines, ExtractionRule, Judge, JudgeConfig,
    JudgeScript, ModelJudge, ScriptedJudge,
};
pub use rubric::{
    cluster_ingredients, read_rubric_file, write_rubric_file, Importance, IngredientCandidate,
    RubricFileError, RubricIngredient,
};
pub use verdict::{parse_grade, Grade, JudgeRequest, JudgeVerdict, SupportLevel, VerdictKind};

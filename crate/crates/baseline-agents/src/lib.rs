//! Reference agents: a ReAct tool-calling loop and a lexical router that
//! dispatches inputs to sub-agents with fallback.

pub mod react;
pub mod router;

pub use react::{
    react_run, truncate_tool_output, ReactLimits, Termination, Transcript, DEFAULT_STEP_LIMIT,
    SUBMIT_TOOL, TOOL_RESULT_LIMIT_BYTES,
};
pub use router::{
    dispatch, route, trigram_jaccard, Exemplar, ExemplarBank, RouterError, SubAgent,
    DEFAULT_MAX_ATTEMPTS,
};

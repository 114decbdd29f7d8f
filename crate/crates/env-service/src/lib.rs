//! Tool server: serves the corpus tools and a stateful code-execution
//! session over a list/call wire protocol (stdio or local socket), so any
//! agent process can use them identically to in-process calls.

pub mod corpus_tools;
pub mod service;
pub mod session;
pub mod wire;

pub use corpus_tools::{corpus_toolbox, ExecutionTool};
pub use service::{ServeError, ServiceHandle, SocketClient, ToolService};
pub use session::{
    ExecConfig, ExecResult, ExecSession, SessionError, DEFAULT_CELL_TIMEOUT, DEFAULT_OUTPUT_LIMIT,
};
pub use wire::{ErrorObject, Request, Response};

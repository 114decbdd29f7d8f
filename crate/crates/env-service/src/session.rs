//! Stateful code-execution sessions backed by an external interpreter.
//!
//! Each session owns one long-lived guest process running a small driver
//! loop: the host sends one JSON line per cell, the guest evaluates it in a
//! persistent namespace and replies with one JSON line. Cell timeouts are
//! enforced inside the guest with an interval timer, so a timed-out cell
//! reports failure without killing the session.

use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Driver program handed to the guest interpreter on startup.
///
/// The last statement of a cell, when it is an expression, is evaluated
/// separately so its repr can be returned as the cell value. Shell-escape
/// and magic lines are passed to the guest verbatim; a plain interpreter
/// rejects them as syntax errors rather than emulating them.
const GUEST_DRIVER: &str = r#"
import ast, contextlib, io, json, signal, sys

ns = {}

class _CellTimeout(Exception):
    pass

def _alarm(signum, frame):
    raise _CellTimeout()

signal.signal(signal.SIGALRM, _alarm)

for line in sys.stdin:
    req = json.loads(line)
    buf = io.StringIO()
    value = None
    timed_out = False
    try:
        signal.setitimer(signal.ITIMER_REAL, req["timeout"])
        with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(buf):
            tree = ast.parse(req["source"])
            tail = None
            if tree.body and isinstance(tree.body[-1], ast.Expr):
                tail = ast.Expression(tree.body.pop().value)
            exec(compile(tree, "<cell>", "exec"), ns)
            if tail is not None:
                result = eval(compile(tail, "<cell>", "eval"), ns)
                if result is not None:
                    value = repr(result)
    except _CellTimeout:
        timed_out = True
        buf.write("timeout: cell exceeded the %.3gs limit\n" % req["timeout"])
    except BaseException as exc:
        buf.write("%s: %s\n" % (type(exc).__name__, exc))
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
    reply = {"stdout": buf.getvalue(), "value": value, "timed_out": timed_out}
    sys.stdout.write(json.dumps(reply) + "\n")
    sys.stdout.flush()
"#;

pub const DEFAULT_CELL_TIMEOUT: Duration = Duration::from_secs(300);
pub const DEFAULT_OUTPUT_LIMIT: usize = 16_384;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExecConfig {
    /// Guest interpreter command; must accept `-c <program>`.
    pub guest_command: String,
    pub cell_timeout: Duration,
    pub output_limit_bytes: usize,
    /// Per-session working directory; a temporary one when absent.
    pub working_dir: Option<PathBuf>,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            guest_command: "python3".into(),
            cell_timeout: DEFAULT_CELL_TIMEOUT,
            output_limit_bytes: DEFAULT_OUTPUT_LIMIT,
            working_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecResult {
    pub stdout: String,
    pub value: Option<String>,
    pub truncated: bool,
    pub timed_out: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("guest interpreter unavailable: {0}")]
    GuestUnavailable(String),
    #[error("session closed")]
    Closed,
    #[error("guest interpreter crashed: {0}")]
    GuestCrashed(String),
}

#[derive(Deserialize)]
struct GuestReply {
    stdout: String,
    value: Option<String>,
    timed_out: bool,
}

pub struct ExecSession {
    pub session_id: String,
    config: ExecConfig,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: Option<BufReader<ChildStdout>>,
    // Keeps the auto-created working directory alive for the session.
    _workdir_guard: Option<tempfile::TempDir>,
}

impl ExecSession {
    pub fn open(session_id: impl Into<String>, config: ExecConfig) -> Result<Self, SessionError> {
        let guard = match &config.working_dir {
            Some(_) => None,
            None => Some(
                tempfile::tempdir().map_err(|e| SessionError::GuestUnavailable(e.to_string()))?,
            ),
        };
        let workdir = config
            .working_dir
            .clone()
            .unwrap_or_else(|| guard.as_ref().unwrap().path().to_path_buf());
        let mut child = Command::new(&config.guest_command)
            .arg("-c")
            .arg(GUEST_DRIVER)
            .current_dir(&workdir)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SessionError::GuestUnavailable(e.to_string()))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(ExecSession {
            session_id: session_id.into(),
            config,
            child,
            stdin: Some(stdin),
            stdout: Some(stdout),
            _workdir_guard: guard,
        })
    }

    pub fn is_open(&self) -> bool {
        self.stdin.is_some()
    }

    /// Runs one cell. Serial per session: each call waits for the guest's
    /// reply to the previous one by construction.
    pub fn execute(&mut self, source: &str) -> Result<ExecResult, SessionError> {
        let (Some(stdin), Some(stdout)) = (self.stdin.as_mut(), self.stdout.as_mut()) else {
            return Err(SessionError::Closed);
        };
        let request = serde_json::json!({
            "source": source,
            "timeout": self.config.cell_timeout.as_secs_f64(),
        });
        let crashed = |e: String| SessionError::GuestCrashed(e);
        stdin
            .write_all(format!("{request}\n").as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| crashed(e.to_string()))?;
        let mut line = String::new();
        let n = stdout.read_line(&mut line).map_err(|e| crashed(e.to_string()))?;
        if n == 0 {
            self.stdin = None;
            self.stdout = None;
            return Err(SessionError::GuestCrashed("guest exited mid-cell".into()));
        }
        let reply: GuestReply =
            serde_json::from_str(&line).map_err(|e| crashed(e.to_string()))?;
        let (stdout_text, truncated) = truncate_bytes(reply.stdout, self.config.output_limit_bytes);
        Ok(ExecResult {
            stdout: stdout_text,
            value: reply.value,
            truncated,
            timed_out: reply.timed_out,
        })
    }

    pub fn close(&mut self) {
        self.stdin = None; // EOF makes the driver loop exit.
        self.stdout = None;
        let _ = self.child.wait();
    }
}

impl Drop for ExecSession {
    fn drop(&mut self) {
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Keeps exactly `limit` bytes, backing off to the nearest character
/// boundary when the cut would split a multi-byte character.
fn truncate_bytes(text: String, limit: usize) -> (String, bool) {
    if text.len() <= limit {
        return (text, false);
    }
    let mut cut = limit;
    while cut > 0 && !text.is_char_boundary(cut) {
        cut -= 1;
    }
    (text[..cut].to_string(), true)
}

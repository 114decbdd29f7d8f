//! Serves a [`Toolbox`] over stdio or a local socket.

use std::io::{BufRead, BufReader, Write};
use std::os::unix::net::{UnixListener, UnixStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use model_gateway::{ToolError, Toolbox};
use serde_json::{json, Value};

use crate::wire::{self, Request, Response};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("toolset is empty")]
    EmptyToolset,
    #[error("transport bind failure: {0}")]
    Bind(#[from] std::io::Error),
}

/// Stateless request dispatcher shared by every transport.
#[derive(Clone)]
pub struct ToolService {
    toolbox: Arc<Toolbox>,
}

impl ToolService {
    pub fn new(toolbox: Toolbox) -> Result<Self, ServeError> {
        if toolbox.is_empty() {
            return Err(ServeError::EmptyToolset);
        }
        Ok(ToolService { toolbox: Arc::new(toolbox) })
    }

    /// Handles one raw request line and renders the response line.
    pub fn handle_line(&self, line: &str) -> String {
        let response = match serde_json::from_str::<Request>(line) {
            Ok(request) => self.handle(request),
            Err(e) => Response::fail(Value::Null, wire::PARSE_ERROR, e.to_string()),
        };
        serde_json::to_string(&response).expect("response serializes")
    }

    pub fn handle(&self, request: Request) -> Response {
        match request.method.as_str() {
            "tools/list" => {
                let tools = self.toolbox.descriptors();
                Response::ok(request.id, json!({ "tools": tools }))
            }
            "tools/call" => {
                let name = match request.params.get("name").and_then(Value::as_str) {
                    Some(name) => name.to_string(),
                    None => {
                        return Response::fail(
                            request.id,
                            wire::INVALID_PARAMS,
                            "params.name must be a string",
                        )
                    }
                };
                let arguments =
                    request.params.get("arguments").cloned().unwrap_or_else(|| json!({}));
                match self.toolbox.invoke(&name, &arguments) {
                    Ok(result) => Response::ok(request.id, result),
                    Err(ToolError::NotFound(name)) => Response::fail(
                        request.id,
                        wire::METHOD_NOT_FOUND,
                        format!("unknown tool: {name}"),
                    ),
                    Err(ToolError::InvalidParams(message)) => {
                        Response::fail(request.id, wire::INVALID_PARAMS, message)
                    }
                    // Tool-level failure: the connection stays healthy and the
                    // category travels with the payload.
                    Err(ToolError::Failed { category, message }) => Response::ok(
                        request.id,
                        json!({ "is_error": true, "category": category, "message": message }),
                    ),
                }
            }
            other => Response::fail(
                request.id,
                wire::METHOD_NOT_FOUND,
                format!("unknown method: {other}"),
            ),
        }
    }

    /// Serves newline-delimited requests from `input` until EOF.
    pub fn serve_stdio(&self, input: impl std::io::Read, mut output: impl Write) -> std::io::Result<()> {
        let reader = BufReader::new(input);
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            output.write_all(self.handle_line(&line).as_bytes())?;
            output.write_all(b"\n")?;
            output.flush()?;
        }
        Ok(())
    }

    /// Binds a local socket and serves each connection on its own thread.
    pub fn serve_socket(&self, path: &Path) -> Result<ServiceHandle, ServeError> {
        let listener = UnixListener::bind(path)?;
        let shutdown = Arc::new(AtomicBool::new(false));
        let service = self.clone();
        let flag = shutdown.clone();
        let accept_loop = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let service = service.clone();
                std::thread::spawn(move || {
                    let reader = BufReader::new(stream.try_clone().expect("clone stream"));
                    let mut writer = stream;
                    for line in reader.lines() {
                        let Ok(line) = line else { break };
                        if line.trim().is_empty() {
                            continue;
                        }
                        let reply = service.handle_line(&line);
                        if writer
                            .write_all(format!("{reply}\n").as_bytes())
                            .and_then(|_| writer.flush())
                            .is_err()
                        {
                            break;
                        }
                    }
                });
            }
        });
        Ok(ServiceHandle { path: path.to_path_buf(), shutdown, accept_loop: Some(accept_loop) })
    }
}

/// Running socket service; shuts down on drop.
pub struct ServiceHandle {
    path: PathBuf,
    shutdown: Arc<AtomicBool>,
    accept_loop: Option<JoinHandle<()>>,
}

impl ServiceHandle {
    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        // Wake the accept loop so it observes the flag.
        let _ = UnixStream::connect(&self.path);
        if let Some(handle) = self.accept_loop.take() {
            let _ = handle.join();
        }
        let _ = std::fs::remove_file(&self.path);
    }
}

impl Drop for ServiceHandle {
    fn drop(&mut self) {
        if self.accept_loop.is_some() {
            self.stop();
        }
    }
}

/// Line-oriented client for a socket service.
pub struct SocketClient {
    reader: BufReader<UnixStream>,
    writer: UnixStream,
    next_id: u64,
}

impl SocketClient {
    pub fn connect(path: &Path) -> std::io::Result<Self> {
        let stream = UnixStream::connect(path)?;
        Ok(SocketClient {
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
            next_id: 0,
        })
    }

    pub fn request(&mut self, method: &str, params: Value) -> std::io::Result<Response> {
        self.next_id += 1;
        let request = Request { id: json!(self.next_id), method: method.into(), params };
        let line = serde_json::to_string(&request).expect("request serializes");
        self.writer.write_all(format!("{line}\n").as_bytes())?;
        self.writer.flush()?;
        let mut reply = String::new();
        self.reader.read_line(&mut reply)?;
        serde_json::from_str(&reply)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    pub fn call(&mut self, tool: &str, arguments: Value) -> std::io::Result<Response> {
        self.request("tools/call", json!({ "name": tool, "arguments": arguments }))
    }

    pub fn list(&mut self) -> std::io::Result<Response> {
        self.request("tools/list", Value::Null)
    }
}

//! Child-process evaluators speaking a newline-delimited JSON protocol.
//!
//! Request, one per line: `{"x":[...]}`. Response, one per line:
//! `{"f":[...]}` or `{"f":[...],"g":[...]}`. A line beginning with
//! `{"error":` reports an evaluator-side failure.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::base::problem::{Evaluation, Problem, ProblemSpec};
use crate::error::{Error, Result};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Serialize)]
struct Request<'a> {
    x: &'a [f64],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Response {
    f: Vec<f64>,
    #[serde(default)]
    g: Vec<f64>,
}

#[derive(Deserialize)]
struct ErrorResponse {
    error: serde_json::Value,
}

pub fn encode_request(x: &[f64]) -> String {
    serde_json::to_string(&Request { x }).expect("finite floats serialize")
}

/// Parses one response line into an expensive evaluation.
pub fn decode_response(line: &str) -> Result<Evaluation> {
    let line = line.trim_end_matches(['\r', '\n']);
    if line.trim_start().starts_with("{\"error\":") {
        let msg = serde_json::from_str::<ErrorResponse>(line)
            .map(|e| match e.error {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            })
            .unwrap_or_else(|_| line.to_string());
        return Err(Error::EvaluatorFailed(msg));
    }
    let resp: Response = serde_json::from_str(line)
        .map_err(|e| Error::ProtocolError(format!("{e}: {line:?}")))?;
    Ok(Evaluation::expensive(resp.f, resp.g))
}

/// Handle to a running evaluator process.
pub struct ExternalEvaluator {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ExternalEvaluator {
    pub fn spawn(program: &str, args: &[String], timeout: Duration) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::EvaluatorCrashed(format!("cannot start `{program}`: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ExternalEvaluator {
            child,
            stdin,
            lines: rx,
            timeout,
        })
    }

    /// Sends one request and waits for its response line.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<Evaluation> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| Error::EvaluatorCrashed("evaluator stdin closed".into()))?;
        let mut req = encode_request(x);
        req.push('\n');
        if let Err(e) = stdin.write_all(req.as_bytes()).and_then(|_| stdin.flush()) {
            return Err(self.crashed(format!("write failed: {e}")));
        }
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => decode_response(&line),
            Ok(Err(e)) => Err(self.crashed(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                let _ = self.child.kill();
                self.stdin = None;
                Err(Error::Timeout(self.timeout))
            }
            Err(RecvTimeoutError::Disconnected) => Err(self.crashed("stdout closed".into())),
        }
    }

    fn crashed(&mut self, what: String) -> Error {
        self.stdin = None;
        let status = match self.child.try_wait() {
            Ok(Some(status)) => format!(" ({status})"),
            _ => String::new(),
        };
        Error::EvaluatorCrashed(format!("{what}{status}"))
    }
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        // Closing stdin lets well-behaved evaluators exit on EOF.
        self.stdin = None;
        for _ in 0..50 {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(2));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A [`Problem`] backed by an external evaluator process.
pub struct ExternalProblem {
    spec: ProblemSpec,
    command: String,
    evaluator: Mutex<ExternalEvaluator>,
}

impl ExternalProblem {
    pub fn spawn(
        spec: ProblemSpec,
        program: &str,
        args: &[String],
        timeout: Duration,
    ) -> Result<Self> {
        spec.validate()?;
        let evaluator = ExternalEvaluator::spawn(program, args, timeout)?;
        let mut command = program.to_string();
        for a in args {
            command.push(' ');
            command.push_str(a);
        }
        Ok(ExternalProblem {
            spec,
            command,
            evaluator: Mutex::new(evaluator),
        })
    }
}

impl Problem for ExternalProblem {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn evaluate(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.spec.check_bounds(x)?;
        let eval = self
            .evaluator
            .lock()
            .map_err(|_| Error::EvaluatorCrashed("evaluator lock poisoned".into()))?
            .evaluate(x)?;
        if eval.f.len() != self.spec.n_obj || eval.g.len() != self.spec.n_constr {
            return Err(Error::ProtocolError(format!(
                "expected {} objectives and {} constraints, got {} and {}",
                self.spec.n_obj,
                self.spec.n_constr,
                eval.f.len(),
                eval.g.len()
            )));
        }
        Ok((eval.f, eval.g))
    }

    fn name(&self) -> String {
        self.command.clone()
    }
}

/// Serves requests from `input` until EOF, answering with `respond`.
///
/// This is the evaluator side of the protocol; the bundled evaluators in the
/// `samoo` binary are thin wrappers around it.
pub fn serve<R: BufRead, W: Write>(
    input: R,
    mut output: W,
    respond: impl Fn(&[f64]) -> (Vec<f64>, Vec<f64>),
) -> std::io::Result<()> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct In {
        x: Vec<f64>,
    }
    #[derive(Serialize)]
    struct Out {
        f: Vec<f64>,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        g: Vec<f64>,
    }
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match serde_json::from_str::<In>(&line) {
            Ok(req) => {
                let (f, g) = respond(&req.x);
                serde_json::to_string(&Out { f, g })
            }
            Err(e) => serde_json::to_string(&serde_json::json!({ "error": e.to_string() })),
        }
        .map_err(std::io::Error::other)?;
        writeln!(output, "{reply}")?;
        output.flush()?;
    }
    Ok(())
}

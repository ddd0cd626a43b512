use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: keller_core::Error,
    },

    #[error("{0}")]
    Core(#[from] keller_core::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 1 when the mathematics says no, 2 when the input is at fault.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(keller_core::Error::HypothesisFailed(_) | keller_core::Error::VerificationFailed(_)) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command produced: the echo of its inputs, structured results, a
/// text rendering, and a message when the verdict is negative.
pub struct Outcome {
    pub inputs: Value,
    pub results: Value,
    pub text: Vec<String>,
    pub negative: Option<String>,
}

impl Outcome {
    pub fn ok(inputs: Value, results: Value, text: Vec<String>) -> Self {
        Outcome {
            inputs,
            results,
            text,
            negative: None,
        }
    }

    pub fn negative_if(mut self, cond: bool, message: impl Into<String>) -> Self {
        if cond {
            self.negative = Some(message.into());
        }
        self
    }
}

/// The JSON report. Keys come out sorted since `serde_json` maps are ordered.
pub fn report(command: &str, outcome: &CliResult<Outcome>) -> (Value, u8) {
    match outcome {
        Ok(o) => {
            let (status, code) = match &o.negative {
                None => ("ok", 0),
                Some(_) => ("negative", 1),
            };
            let v = json!({
                "command": command,
                "inputs": o.inputs,
                "results": o.results,
                "status": status,
                "message": o.negative,
            });
            (v, code)
        }
        Err(e) => {
            let code = e.exit_code();
            let status = if code == 1 { "negative" } else { "error" };
            let v = json!({
                "command": command,
                "inputs": Value::Null,
                "results": Value::Null,
                "status": status,
                "message": e.to_string(),
            });
            (v, code)
        }
    }
}

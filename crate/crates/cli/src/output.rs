use std::io::Write;

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_LAW_FAILURE: u8 = 1;
pub const EXIT_INPUT_ERROR: u8 = 2;

/// What a command produced when its inputs were usable.
#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    /// Standard output in text mode.
    pub text: String,
    /// Standard error in text mode (certificates next to a CSV body).
    pub notes: String,
    /// Payload under `report` in JSON mode.
    pub report: Value,
}

impl Outcome {
    pub fn new(passed: bool, text: String, report: Value) -> Self {
        Outcome {
            passed,
            text,
            notes: String::new(),
            report,
        }
    }
}

/// Residuals in text reports: three significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

pub fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

/// A closed pipe (`sumrule ... | head`) is not an error worth reporting.
fn write_out(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn error_code(e: &sumrule::Error) -> u8 {
    if e.is_law_failure() {
        EXIT_LAW_FAILURE
    } else {
        EXIT_INPUT_ERROR
    }
}

fn error_json(e: &sumrule::Error) -> Value {
    let mut v = json!({ "kind": e.kind(), "message": e.to_string() });
    match e {
        sumrule::Error::Parse { line, .. } => v["line"] = json!(line),
        sumrule::Error::Cycle(ids) => v["cycle"] = json!(ids),
        sumrule::Error::Certification {
            residual,
            tolerance,
        } => {
            v["residual"] = json!(residual);
            v["tolerance"] = json!(tolerance);
        }
        sumrule::Error::Precheck(laws) => v["laws"] = json!(laws),
        _ => {}
    }
    v
}

/// Print the result in the chosen format and return the process exit code.
pub fn emit(command: &str, format: Format, result: sumrule::Result<Outcome>) -> u8 {
    let (code, envelope) = match result {
        Ok(outcome) => {
            let code = if outcome.passed {
                EXIT_PASS
            } else {
                EXIT_LAW_FAILURE
            };
            if format == Format::Text {
                write_out(&outcome.text);
                let _ = std::io::stderr().write_all(outcome.notes.as_bytes());
                return code;
            }
            let status = if outcome.passed { "pass" } else { "fail" };
            let envelope = json!({
                "command": command,
                "status": status,
                "exit_code": code,
                "report": outcome.report,
            });
            (code, envelope)
        }
        Err(e) => {
            let code = error_code(&e);
            if format == Format::Text {
                eprintln!("error: {e}");
                return code;
            }
            let status = if code == EXIT_LAW_FAILURE {
                "fail"
            } else {
                "error"
            };
            let envelope = json!({
                "command": command,
                "status": status,
                "exit_code": code,
                "error": error_json(&e),
            });
            (code, envelope)
        }
    };
    let mut body = serde_json::to_string_pretty(&envelope).expect("json values serialize");
    body.push('\n');
    write_out(&body);
    code
}

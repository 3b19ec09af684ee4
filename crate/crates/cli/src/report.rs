//! Report envelopes and their bit-exact replay.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::commands::{default_commands, Context};
use crate::error::{CliError, CliResult};

pub const TOOL: &str = "locglob";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Every flag of the run, seeds included.
    pub config: Value,
    /// sha256 of each input file, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    /// Absolute tolerance for floats on replay; 0 means bit-exact.
    pub float_tolerance: f64,
    pub result: Value,
    /// Wall time; not compared on replay.
    pub elapsed_ms: u128,
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

pub fn sha256_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Runs the named command on a JSON configuration and wraps the result.
pub fn run_command(command: &str, config: Value, ctx: &Context) -> CliResult<Report> {
    let commands = default_commands();
    let cmd = commands.get(command)?;
    let start = std::time::Instant::now();
    let mut inputs = BTreeMap::new();
    for path in cmd.inputs(&config)? {
        inputs.insert(path.display().to_string(), sha256_file(&path)?);
    }
    let result = cmd.execute(&config, ctx)?;
    Ok(Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: command.into(),
        config,
        inputs,
        float_tolerance: 0.0,
        result,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Difference {
    pub path: String,
    pub expected: Value,
    pub actual: Value,
}

fn diff_into(path: &str, expected: &Value, actual: &Value, tol: f64, out: &mut Vec<Difference>) {
    match (expected, actual) {
        (Value::Object(a), Value::Object(b)) => {
            let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
            for key in keys {
                diff_into(
                    &format!("{path}/{key}"),
                    a.get(key).unwrap_or(&Value::Null),
                    b.get(key).unwrap_or(&Value::Null),
                    tol,
                    out,
                );
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                diff_into(&format!("{path}/{i}"), x, y, tol, out);
            }
        }
        (Value::Number(a), Value::Number(b)) if a != b => {
            let close = match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => tol > 0.0 && (x - y).abs() <= tol,
                _ => false,
            };
            if !close {
                out.push(Difference {
                    path: path.into(),
                    expected: expected.clone(),
                    actual: actual.clone(),
                });
            }
        }
        _ if expected != actual => out.push(Difference {
            path: path.into(),
            expected: expected.clone(),
            actual: actual.clone(),
        }),
        _ => {}
    }
}

/// JSON-pointer paths at which two values differ.
pub fn diff(expected: &Value, actual: &Value, tol: f64) -> Vec<Difference> {
    let mut out = Vec::new();
    diff_into("", expected, actual, tol, &mut out);
    out
}

/// Re-runs a report from its embedded configuration without writing side
/// outputs. Returns the fresh report, or `Mismatch` carrying the
/// structured difference.
pub fn replay(report: &Report) -> CliResult<Report> {
    if report.tool != TOOL {
        return Err(CliError::Usage(format!("not a {TOOL} report: tool = {}", report.tool)));
    }
    let ctx = Context { write_outputs: false };
    let fresh = run_command(&report.command, report.config.clone(), &ctx)?;
    let mut differences = Vec::new();
    if fresh.version != report.version {
        differences.push(Difference {
            path: "/version".into(),
            expected: json!(report.version),
            actual: json!(fresh.version),
        });
    }
    differences.extend(
        diff(&json!(report.inputs), &json!(fresh.inputs), 0.0)
            .into_iter()
            .map(|d| Difference {
                path: format!("/inputs{}", d.path),
                ..d
            }),
    );
    differences.extend(
        diff(&report.result, &fresh.result, report.float_tolerance)
            .into_iter()
            .map(|d| Difference {
                path: format!("/result{}", d.path),
                ..d
            }),
    );
    if differences.is_empty() {
        Ok(fresh)
    } else {
        Err(CliError::Mismatch(json!({
            "command": report.command,
            "differences": differences,
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_reports_paths() {
        let a = json!({"x": [1, 2.5, {"y": "a"}], "z": 1});
        let b = json!({"x": [1, 2.5, {"y": "b"}], "w": 2});
        let d = diff(&a, &b, 0.0);
        let paths: Vec<&str> = d.iter().map(|d| d.path.as_str()).collect();
        assert_eq!(paths, vec!["/w", "/x/2/y", "/z"]);
        assert!(diff(&json!(1.0), &json!(1.0 + 1e-12), 1e-9).is_empty());
        assert_eq!(diff(&json!(1.0), &json!(1.0 + 1e-12), 0.0).len(), 1);
    }
}

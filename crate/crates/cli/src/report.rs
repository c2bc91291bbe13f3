use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

/// Envelope printed for every successful command.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Map<String, Value>>,
    pub artifact_version: String,
}

/// Per-stage wall clock, in milliseconds.
#[derive(Debug, Default)]
pub struct Stages {
    stages: Vec<(String, f64)>,
}

impl Stages {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages
            .push((name.to_string(), start.elapsed().as_secs_f64() * 1e3));
        out
    }

    pub fn into_map(self) -> Map<String, Value> {
        self.stages
            .into_iter()
            .map(|(k, v)| (k, json!((v * 1000.0).round() / 1000.0)))
            .collect()
    }
}

/// A command-line usage problem detected after parsing (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

/// Exit code and machine-readable kind for an error chain.
pub fn classify(err: &anyhow::Error) -> (i32, &'static str) {
    use syzygy_core::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Parse(_) | E::NotPrime(_) | E::ModulusOutOfRange(_) => (EXIT_PARSE, "parse"),
                E::DegenerateSection { .. } => (EXIT_DEGENERATE, "degenerate_section"),
                E::BudgetExceeded { .. } => (EXIT_BUDGET, "budget_exceeded"),
                _ => (EXIT_OTHER, "computation"),
            };
        }
        if let Some(e) = cause.downcast_ref::<std::io::Error>() {
            if e.kind() == std::io::ErrorKind::NotFound {
                return (EXIT_NOT_FOUND, "file_not_found");
            }
            return (EXIT_OTHER, "io");
        }
        if cause.downcast_ref::<serde_json::Error>().is_some()
            || cause.downcast_ref::<UsageError>().is_some()
        {
            return (EXIT_PARSE, "parse");
        }
    }
    (EXIT_OTHER, "error")
}

pub fn error_object(err: &anyhow::Error) -> (i32, Value) {
    let (code, kind) = classify(err);
    let causes: Vec<String> = err.chain().skip(1).map(|c| c.to_string()).collect();
    (
        code,
        json!({
            "error": {
                "kind": kind,
                "exit_code": code,
                "message": err.to_string(),
                "causes": causes,
            }
        }),
    )
}

/// Aligned `key: value` rendering of a JSON value.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render(&mut out, v, 0);
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) if a.iter().all(is_scalar) => {
            let items: Vec<String> = a.iter().map(inline).collect();
            format!("[{}]", items.join(", "))
        }
        other => other.to_string(),
    }
}

fn is_inline(v: &Value) -> bool {
    is_scalar(v) || matches!(v, Value::Array(a) if a.iter().all(is_scalar))
}

fn render(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map
                .iter()
                .filter(|(_, val)| is_inline(val))
                .map(|(k, _)| k.len())
                .max()
                .unwrap_or(0);
            for (k, val) in map {
                if is_inline(val) {
                    let _ = writeln!(out, "{pad}{k:<width$}  {}", inline(val));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    render(out, val, indent + 2);
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                if is_inline(item) {
                    let _ = writeln!(out, "{pad}- {}", inline(item));
                } else {
                    let _ = writeln!(out, "{pad}[{i}]");
                    render(out, item, indent + 2);
                }
            }
        }
        scalar => {
            let _ = writeln!(out, "{pad}{}", inline(scalar));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_is_aligned() {
        let v = json!({"dims": [5, 5, 0], "n": 10, "nested": {"a": "x"}});
        let t = render_text(&v);
        assert!(t.contains("dims  [5, 5, 0]"));
        assert!(t.contains("nested:\n  a  x"));
    }

    #[test]
    fn exit_codes() {
        let e = anyhow::Error::new(syzygy_core::Error::BudgetExceeded {
            minors: 1,
            graded_dim: 1,
            budget: 0,
        });
        assert_eq!(classify(&e).0, EXIT_BUDGET);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        let e = anyhow::Error::new(io).context("reading ideal");
        assert_eq!(classify(&e).0, EXIT_NOT_FOUND);
        let e = anyhow::Error::new(UsageError("bad".into()));
        assert_eq!(error_object(&e).1["error"]["kind"], "parse");
    }
}

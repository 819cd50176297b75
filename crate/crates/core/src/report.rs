//! Machine-readable run reports.
//!
//! Every report is a JSON object
//!
//! ```text
//! { "schema_version": 1, "tool": "drknn", "command": "<lfd|classify|eval|sweep|verify>",
//!   "config": { ...resolved run configuration... }, "result": { ...command specific... },
//!   "timing": { "seconds": f64, ... } }
//! ```
//!
//! `config` is complete: feeding it back through `--config` reproduces
//! `result` exactly. Wall-clock numbers live only under `timing`. Class labels
//! in `result` are 1-based, like in dataset files. `docs/report-schema.md`
//! lists the per-command `result` fields that [`validate`] checks.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub schema_version: u64,
    pub tool: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub result: R,
    pub timing: Value,
}

impl<'a, C: Serialize, R: Serialize> Report<'a, C, R> {
    pub fn new(command: &'a str, config: &'a C, result: R, timing: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "drknn",
            command,
            config,
            result,
            timing,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Shape(format!("report serialization: {e}")))
    }
}

/// Writes `text` to `path`, or to stdout when there is no path.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Writes a header plus rows as CSV.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Shape(format!("csv: {other:?}")),
    }
}

const COMMON_KEYS: [&str; 6] = ["schema_version", "tool", "command", "config", "result", "timing"];

/// Required `result` keys per command.
fn result_keys(command: &str) -> Option<&'static [&'static str]> {
    Some(match command {
        "lfd" => &[
            "status",
            "objective",
            "minimax_risk",
            "lfds",
            "spend",
            "radii",
            "n",
            "class_count",
        ],
        "classify" => &["method", "predictions", "accuracy", "radii"],
        "eval" => &["reports", "paired"],
        "sweep" => &["parameter", "values", "reports", "accuracy_range"],
        "verify" => &["checks", "passed", "failed", "all_passed"],
        _ => return None,
    })
}

/// Structural check of a parsed report against the published schema.
pub fn validate(report: &Value) -> Result<()> {
    let bad = |why: String| Err(Error::Shape(format!("report does not match schema: {why}")));
    let Some(obj) = report.as_object() else {
        return bad("top level is not an object".into());
    };
    for key in COMMON_KEYS {
        if !obj.contains_key(key) {
            return bad(format!("missing `{key}`"));
        }
    }
    if obj["schema_version"].as_u64() != Some(SCHEMA_VERSION) {
        return bad(format!(
            "schema_version is {}, expected {SCHEMA_VERSION}",
            obj["schema_version"]
        ));
    }
    if !obj["config"].is_object() {
        return bad("`config` is not an object".into());
    }
    let Some(command) = obj["command"].as_str() else {
        return bad("`command` is not a string".into());
    };
    let Some(keys) = result_keys(command) else {
        return bad(format!("unknown command `{command}`"));
    };
    let Some(result) = obj["result"].as_object() else {
        return bad("`result` is not an object".into());
    };
    for key in keys {
        if !result.contains_key(*key) {
            return bad(format!("{command} result is missing `{key}`"));
        }
    }
    if matches!(command, "eval" | "sweep") {
        for (i, r) in result["reports"].as_array().into_iter().flatten().enumerate() {
            let accs = r["accuracies"].as_array();
            let ok = accs.is_some_and(|a| a.iter().all(|v| v.as_f64().is_some_and(|x| (0.0..=1.0).contains(&x))))
                && r["mean"].is_number()
                && r["std"].is_number();
            if !ok {
                return bad(format!("reports[{i}] lacks accuracies in [0, 1], mean or std"));
            }
        }
    }
    Ok(())
}

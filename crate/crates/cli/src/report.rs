//! Deterministic reports.
//!
//! Objects are `serde_json` maps, which keep keys sorted, and every float is
//! rounded to twelve decimals so that output bytes do not depend on the last
//! bits of the eigensolver.

use qlab::ComplexMatrix;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const TOOL: &str = concat!("qlab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Subcommand and the arguments that shape the result, with file paths
    /// reduced to their base names.
    pub command: Vec<String>,
    pub input_sha256: String,
    pub results: Map<String, Value>,
}

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn num(x: f64) -> Value {
    let r = (x * 1e12).round() / 1e12;
    // avoid "-0.0"
    json!(if r == 0.0 { 0.0 } else { r })
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| json!([num(m[(i, j)].re), num(m[(i, j)].im)])).collect()))
            .collect(),
    )
}

/// Builds a JSON object from `(key, value)` pairs.
pub fn obj<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = obj([
            ("tool", json!(TOOL)),
            ("command", json!(self.command)),
            ("input_sha256", json!(self.input_sha256)),
            ("results", Value::Object(self.results.clone())),
        ]);
        let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{TOOL}\ncommand: {}\ninput sha256: {}\n", self.command.join(" "), self.input_sha256);
        for (k, v) in &self.results {
            flatten_text(k, v, &mut out);
        }
        out
    }
}

fn is_scalar_array(v: &[Value]) -> bool {
    v.iter().all(|x| !x.is_object() && !x.as_array().is_some_and(|a| a.iter().any(|y| y.is_object())))
}

fn flatten_text(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten_text(&format!("{prefix}.{k}"), x, out);
            }
        }
        Value::Array(a) if !is_scalar_array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten_text(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

//! Shared helpers for the CSV and JSON artifacts.

use serde::Serialize;

use crate::error::{Error, Result};

/// Version tag written into every CSV header comment.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn csv_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn csv_opt_float(x: Option<f64>) -> String {
    x.map(csv_float).unwrap_or_default()
}

/// Quotes a field when it contains a separator, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `# <name> v<version>: <columns>` followed by the column header line.
pub fn csv_header(name: &str, columns: &[&str]) -> String {
    let cols = columns.join(",");
    format!("# {name} v{CSV_SCHEMA_VERSION}: {cols}\n{cols}\n")
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same value.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Serialization(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

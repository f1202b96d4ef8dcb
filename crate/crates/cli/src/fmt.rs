//! Deterministic output helpers: CSV floats carry 17 significant digits so
//! every double round-trips exactly, and JSON objects are emitted with sorted
//! keys (serde_json's default map) so reruns are byte-identical.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// 17 significant digits, `.` decimal separator.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes to `--out PATH` when given, stdout otherwise.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}

pub fn json_pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serialisation cannot fail");
    s.push('\n');
    s
}

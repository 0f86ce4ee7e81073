use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use ehpo_core::hpo::write_atomic;
use serde::Serialize;

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Expected times print as `inf` when unreachable.
pub fn fmt_time(t: f64) -> String {
    if t.is_finite() {
        if t < 1e6 {
            format!("{t:.3}")
        } else {
            format!("{t:.3e}")
        }
    } else {
        "inf".into()
    }
}

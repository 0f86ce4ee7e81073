use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ehpo_core::hpo::{load_log, Log};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{write_bytes, write_json};

fn walk(dir: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            walk(&path, found)?;
        } else {
            found.push(path);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LogSummary {
    file: String,
    procedure: String,
    algorithms: Vec<String>,
    trials: usize,
    total_time: u64,
    best_metric: f64,
}

fn summarize_report(name: &str, v: &Value) -> Option<Value> {
    if name.starts_with("verdict") {
        let items: Vec<Value> = v["verdicts"]
            .as_array()?
            .iter()
            .map(|r| json!({"reasoner": r["reasoner"]["kind"], "verdict": r["verdict"]}))
            .collect();
        Some(json!({"kind": "verdict", "budget": v["budget"], "verdicts": items}))
    } else if name.starts_with("defense") {
        let rows: Vec<Value> = v["rows"]
            .as_array()?
            .iter()
            .map(|r| json!({"threshold": r["threshold"], "outcome": r["outcome"], "formula": r["formula"]}))
            .collect();
        Some(json!({"kind": "defense", "rows": rows}))
    } else if name.starts_with("certificate") {
        let pass = v["checks"]
            .as_array()?
            .iter()
            .all(|c| c["pass"] == Value::Bool(true));
        Some(json!({"kind": "certificate", "gamma": v["gamma"], "r": v["r"], "all_pass": pass}))
    } else if name.starts_with("scout") {
        Some(json!({"kind": "scout", "lo": v["lo"], "hi": v["hi"]}))
    } else {
        None
    }
}

/// Collect every log and report under `dir` into `trials.csv` and `summary.json`.
pub fn report(dir: &Path) -> Result<()> {
    let mut files = Vec::new();
    walk(dir, &mut files)?;
    files.sort();
    let rel = |p: &Path| {
        p.strip_prefix(dir)
            .unwrap_or(p)
            .to_string_lossy()
            .replace('\\', "/")
    };
    let mut logs: Vec<(String, Log)> = Vec::new();
    let mut reports = Vec::new();
    for path in &files {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        if name.ends_with(".ndjson") {
            let log = load_log(path).with_context(|| format!("reading log {}", path.display()))?;
            logs.push((rel(path), log));
        } else if name.ends_with(".json") && name != "summary.json" {
            let text = fs::read_to_string(path)?;
            let Ok(v) = serde_json::from_str::<Value>(&text) else {
                continue;
            };
            if let Some(mut s) = summarize_report(name, &v) {
                s["file"] = Value::String(rel(path));
                reports.push(s);
            }
        }
    }
    if logs.is_empty() && reports.is_empty() {
        bail!("no run artifacts in {}", dir.display());
    }

    let dims: BTreeSet<String> = logs
        .iter()
        .flat_map(|(_, l)| {
            l.trials()
                .iter()
                .flat_map(|t| t.hp.dims().map(String::from))
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["log".to_string(), "algorithm".to_string()];
    header.extend(dims.iter().cloned());
    header.extend(["seed_index".to_string(), "metric".to_string()]);
    w.write_record(&header)?;
    for (file, log) in &logs {
        for t in log.trials() {
            let mut row = vec![file.clone(), t.algorithm_id.clone()];
            row.extend(
                dims.iter()
                    .map(|d| t.hp.get(d).map(|x| x.to_string()).unwrap_or_default()),
            );
            row.push(t.seed_index.to_string());
            row.push(format!("{:.16e}", t.metric));
            w.write_record(&row)?;
        }
    }
    write_bytes(&dir.join("trials.csv"), &w.into_inner()?)?;

    let summary = json!({
        "logs": logs.iter().map(|(file, l)| LogSummary {
            file: file.clone(),
            procedure: l.header().procedure_id.clone(),
            algorithms: l.algorithms().to_vec(),
            trials: l.trials().len(),
            total_time: l.total_time(),
            best_metric: l.best_metric(),
        }).collect::<Vec<_>>(),
        "reports": reports,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    let rows: usize = logs.iter().map(|(_, l)| l.trials().len()).sum();
    println!(
        "{} logs, {rows} trial rows -> {}",
        logs.len(),
        dir.join("trials.csv").display()
    );
    println!(
        "{} reports -> {}",
        reports.len(),
        dir.join("summary.json").display()
    );
    Ok(())
}

//! Experiment logs and their newline-delimited JSON form.
//!
//! The first line of a log file is the header object, every following line is
//! one trial record. Metrics are written with 17 significant digits so that a
//! log serializes to the same bytes wherever it is produced.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use thiserror::Error;

use super::{HpPoint, HpoError, HyperHpConfig};

pub const LOG_SCHEMA_VERSION: &str = "ehpo-log/1";

#[derive(Debug, Error)]
pub enum LogError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported log schema version `{found}` (expected `{LOG_SCHEMA_VERSION}`)")]
    SchemaVersion { found: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("log is empty")]
    Empty,
    #[error("log invariant violated: {0}")]
    Invariant(String),
}

fn serialize_metric<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(S::Error::custom("metric must be finite"));
    }
    let raw = RawValue::from_string(format!("{x:.16e}")).map_err(S::Error::custom)?;
    raw.serialize(s)
}

fn deserialize_metric<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let x = f64::deserialize(d)?;
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(D::Error::custom(format!("metric {x} outside [0, 1]")))
    }
}

/// One inner training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub algorithm_id: String,
    pub hp: HpPoint,
    pub seed_index: u64,
    #[serde(
        serialize_with = "serialize_metric",
        deserialize_with = "deserialize_metric"
    )]
    pub metric: f64,
    pub cost: u64,
}

/// Position of a sub-log produced by [`split_log`](super::split_log).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitInfo {
    pub part: usize,
    pub parts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub schema_version: String,
    pub procedure_id: String,
    pub task_id: String,
    pub algorithms: Vec<String>,
    pub hyper_hp_config: HyperHpConfig,
    pub master_seed: u64,
    pub best_hp: HpPoint,
    pub total_time: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitInfo>,
}

/// A complete record of one HPO run.
///
/// Trials of a multi-algorithm run are interleaved by round: round `i` holds one
/// trial per algorithm, in `header.algorithms` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Log {
    header: LogHeader,
    trials: Vec<TrialRecord>,
}

impl Log {
    /// Assemble a log, computing `best_hp` and `total_time` from the trials.
    pub fn new(
        task_id: &str,
        algorithms: Vec<String>,
        hyper_hp_config: HyperHpConfig,
        master_seed: u64,
        trials: Vec<TrialRecord>,
    ) -> Result<Self, HpoError> {
        let best = best_trial(&trials).ok_or(HpoError::EmptyLog)?;
        let header = LogHeader {
            schema_version: LOG_SCHEMA_VERSION.to_string(),
            procedure_id: hyper_hp_config.procedure_id().to_string(),
            task_id: task_id.to_string(),
            algorithms,
            hyper_hp_config,
            master_seed,
            best_hp: best.hp.clone(),
            total_time: trials.iter().map(|t| t.cost).sum(),
            split: None,
        };
        let log = Self { header, trials };
        log.check_invariants().map_err(HpoError::InvalidLog)?;
        Ok(log)
    }

    pub(crate) fn with_split(mut self, split: SplitInfo) -> Self {
        self.header.split = Some(split);
        self
    }

    pub fn header(&self) -> &LogHeader {
        &self.header
    }

    pub fn trials(&self) -> &[TrialRecord] {
        &self.trials
    }

    pub fn best_hp(&self) -> &HpPoint {
        &self.header.best_hp
    }

    pub fn total_time(&self) -> u64 {
        self.header.total_time
    }

    pub fn algorithms(&self) -> &[String] {
        &self.header.algorithms
    }

    /// Number of search rounds (trials per algorithm).
    pub fn rounds(&self) -> usize {
        self.trials.len() / self.header.algorithms.len().max(1)
    }

    pub fn is_random_search(&self) -> bool {
        self.header.hyper_hp_config.is_random_search()
    }

    /// Highest metric over all trials.
    pub fn best_metric(&self) -> f64 {
        self.trials
            .iter()
            .map(|t| t.metric)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Highest metric of one algorithm, if it appears in the log.
    pub fn best_metric_for(&self, algorithm_id: &str) -> Option<f64> {
        self.trials
            .iter()
            .filter(|t| t.algorithm_id == algorithm_id)
            .map(|t| t.metric)
            .reduce(f64::max)
    }

    fn check_invariants(&self) -> Result<(), String> {
        let h = &self.header;
        if self.trials.is_empty() {
            return Err("log has no trials".into());
        }
        if h.algorithms.is_empty() {
            return Err("log lists no algorithms".into());
        }
        if !self.trials.len().is_multiple_of(h.algorithms.len()) {
            return Err("trial count is not a whole number of rounds".into());
        }
        for (i, t) in self.trials.iter().enumerate() {
            let expected = &h.algorithms[i % h.algorithms.len()];
            if &t.algorithm_id != expected {
                return Err(format!(
                    "trial {i} is for `{}`, expected `{expected}`",
                    t.algorithm_id
                ));
            }
            if t.cost != 1 {
                return Err(format!("trial {i} has cost {} (expected 1)", t.cost));
            }
            if !t.metric.is_finite() {
                return Err(format!("trial {i} has a non-finite metric"));
            }
        }
        let total: u64 = self.trials.iter().map(|t| t.cost).sum();
        if h.total_time != total {
            return Err(format!(
                "total_time {} does not match {} trials",
                h.total_time, total
            ));
        }
        let best = self.best_metric();
        let claimed = self
            .trials
            .iter()
            .filter(|t| t.hp == h.best_hp)
            .map(|t| t.metric)
            .fold(f64::NEG_INFINITY, f64::max);
        if claimed < best {
            return Err(format!(
                "best_hp {} is not a maximum-metric trial",
                h.best_hp
            ));
        }
        Ok(())
    }
}

/// First trial with the maximal metric.
fn best_trial(trials: &[TrialRecord]) -> Option<&TrialRecord> {
    trials
        .iter()
        .fold(None, |best: Option<&TrialRecord>, t| match best {
            Some(b) if b.metric >= t.metric => Some(b),
            _ => Some(t),
        })
}

/// Serialize `log` as newline-delimited JSON.
pub fn write_log<W: Write>(log: &Log, mut out: W) -> Result<(), LogError> {
    let header = serde_json::to_string(&log.header).map_err(io::Error::other)?;
    writeln!(out, "{header}")?;
    for t in &log.trials {
        let line = serde_json::to_string(t).map_err(io::Error::other)?;
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn log_to_string(log: &Log) -> String {
    let mut buf = Vec::new();
    write_log(log, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Parse a log written by [`write_log`], validating every invariant.
pub fn read_log<R: BufRead>(input: R) -> Result<Log, LogError> {
    let mut lines = input.lines().enumerate();
    let header_line = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(LogError::Empty),
    };
    let value: serde_json::Value =
        serde_json::from_str(&header_line).map_err(|e| LogError::Malformed {
            line: 1,
            message: e.to_string(),
        })?;
    match value.get("schema_version").and_then(|v| v.as_str()) {
        Some(LOG_SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(LogError::SchemaVersion {
                found: other.to_string(),
            })
        }
        None => {
            return Err(LogError::Malformed {
                line: 1,
                message: "header has no schema_version".into(),
            })
        }
    }
    let header: LogHeader = serde_json::from_value(value).map_err(|e| LogError::Malformed {
        line: 1,
        message: e.to_string(),
    })?;
    let mut trials = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let trial: TrialRecord = serde_json::from_str(&line).map_err(|e| LogError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        trials.push(trial);
    }
    let log = Log { header, trials };
    log.check_invariants().map_err(LogError::Invariant)?;
    Ok(log)
}

/// Write a log file atomically (temporary file, then rename).
pub fn save_log(log: &Log, path: &Path) -> Result<(), LogError> {
    write_atomic(path, log_to_string(log).as_bytes())?;
    Ok(())
}

pub fn load_log(path: &Path) -> Result<Log, LogError> {
    let file = fs::File::open(path)?;
    read_log(io::BufReader::new(file))
}

/// Write `bytes` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::DiscreteDistribution;
    use crate::hpo::SearchDistribution;

    fn sample_log() -> Log {
        let trials = vec![
            TrialRecord {
                algorithm_id: "a".into(),
                hp: HpPoint::single("x", 1.0),
                seed_index: 0,
                metric: 0.25,
                cost: 1,
            },
            TrialRecord {
                algorithm_id: "a".into(),
                hp: HpPoint::single("x", 2.0),
                seed_index: 1,
                metric: 0.1 + 0.2,
                cost: 1,
            },
        ];
        let cfg = HyperHpConfig::RandomSearch {
            distribution: SearchDistribution::Discrete(
                DiscreteDistribution::new(
                    vec![HpPoint::single("x", 1.0), HpPoint::single("x", 2.0)],
                    vec![0.5, 0.5],
                )
                .unwrap(),
            ),
            trials: 2,
        };
        Log::new("t", vec!["a".into()], cfg, 7, trials).unwrap()
    }

    #[test]
    fn best_and_time() {
        let log = sample_log();
        assert_eq!(log.total_time(), 2);
        assert_eq!(log.best_hp(), &HpPoint::single("x", 2.0));
    }

    #[test]
    fn metric_uses_seventeen_significant_digits() {
        let text = log_to_string(&sample_log());
        assert!(text.contains(r#""metric":3.0000000000000004e-1"#), "{text}");
        assert!(text.contains(r#""metric":2.5000000000000000e-1"#), "{text}");
    }

    #[test]
    fn roundtrip() {
        let log = sample_log();
        let text = log_to_string(&log);
        let back = read_log(text.as_bytes()).unwrap();
        assert_eq!(back, log);
        assert_eq!(log_to_string(&back), text);
    }

    #[test]
    fn unknown_schema_version() {
        let text = log_to_string(&sample_log()).replace(LOG_SCHEMA_VERSION, "ehpo-log/9");
        assert!(matches!(
            read_log(text.as_bytes()),
            Err(LogError::SchemaVersion { found }) if found == "ehpo-log/9"
        ));
    }

    #[test]
    fn truncated_last_line_names_line() {
        let text = log_to_string(&sample_log());
        let cut = &text[..text.len() - 12];
        match read_log(cut.as_bytes()) {
            Err(LogError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed line error, got {other:?}"),
        }
    }

    #[test]
    fn dropped_trial_breaks_accounting() {
        let text = log_to_string(&sample_log());
        let first_two: Vec<&str> = text.lines().take(2).collect();
        let cut = first_two.join("\n");
        assert!(matches!(
            read_log(cut.as_bytes()),
            Err(LogError::Invariant(_))
        ));
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.log.jsonl");
        let log = sample_log();
        save_log(&log, &path).unwrap();
        assert_eq!(load_log(&path).unwrap(), log);
    }
}

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ehpo_core::hpo::{load_log, run_hpo, save_log, split_log};
use ehpo_core::reasoners::{decide, subsample_fractions, DefenseOutcome, DefenseParams, Fractions};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::output::write_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseRow {
    pub threshold: f64,
    pub fractions: Fractions,
    #[serde(flatten)]
    pub outcome: DefenseOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseReport {
    /// `generated`, `log` or `fractions`.
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<DefenseParams>,
    pub rows: Vec<DefenseRow>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FractionFile {
    One(RawFractions),
    Many(Vec<RawFractions>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFractions {
    p: f64,
    not_p: f64,
    #[serde(default)]
    nothing: Option<f64>,
}

impl RawFractions {
    fn fractions(&self) -> Fractions {
        Fractions {
            p: self.p,
            not_p: self.not_p,
            nothing: self.nothing.unwrap_or((1.0 - self.p - self.not_p).max(0.0)),
        }
    }
}

fn read_fractions(path: &Path) -> Result<Vec<Fractions>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed: FractionFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing fractions {}", path.display()))?;
    Ok(match parsed {
        FractionFile::One(f) => vec![f.fractions()],
        FractionFile::Many(v) => v.iter().map(RawFractions::fractions).collect(),
    })
}

/// Subsampled-majority defense. Fractions come from a fixture file, from a
/// given `K*R`-round log, or from a freshly generated one.
pub fn defend(
    cfg: &ExperimentConfig,
    fractions: Option<&Path>,
    log: Option<&Path>,
) -> Result<DefenseReport> {
    let Some(section) = &cfg.defense else {
        bail!("config has no [defense] section");
    };
    let params = section.params();
    params.validate()?;
    let thresholds = section.thresholds();
    let (source, all, params) = match (fractions, log) {
        (Some(_), Some(_)) => bail!("give either --fractions or --log, not both"),
        (Some(path), None) => ("fractions", read_fractions(path)?, None),
        (None, given) => {
            let log = match given {
                Some(p) => load_log(p).with_context(|| format!("reading log {}", p.display()))?,
                None => {
                    let config = cfg
                        .find(&section.config)?
                        .with_trials(params.k * params.r)
                        .expect("validated as random search");
                    let log = run_hpo(&cfg.task, &cfg.algorithms(), &config, cfg.master_seed)?;
                    let path = cfg
                        .out_dir()
                        .join("logs")
                        .join(format!("defense-{}.ndjson", section.config));
                    fs::create_dir_all(path.parent().expect("has parent"))?;
                    save_log(&log, &path)?;
                    log
                }
            };
            let groups = split_log(&log, params.r)?;
            let f = subsample_fractions(
                &groups,
                params.kappa,
                params.sample_budget,
                &cfg.policy,
                cfg.master_seed,
            )?;
            let source = if given.is_some() { "log" } else { "generated" };
            (source, vec![f], Some(params))
        }
    };
    let rows: Vec<DefenseRow> = all
        .iter()
        .flat_map(|f| {
            thresholds.iter().map(|&t| {
                let d = decide(f, t, &cfg.policy);
                DefenseRow {
                    threshold: t,
                    fractions: d.fractions,
                    outcome: d.outcome,
                }
            })
        })
        .collect();
    let report = DefenseReport {
        source: source.into(),
        params,
        rows,
    };
    println!("{:>8} {:>8} {:>8}  outcome", "1-delta", "p", "!p");
    for row in &report.rows {
        let outcome = match &row.outcome {
            DefenseOutcome::Concluded { formula } => formula.to_string(),
            DefenseOutcome::Nothing => "Nothing".into(),
        };
        println!(
            "{:>8} {:>8.3} {:>8.3}  {outcome}",
            row.threshold, row.fractions.p, row.fractions.not_p
        );
    }
    write_json(&cfg.out_dir().join("defense.json"), &report)?;
    Ok(report)
}

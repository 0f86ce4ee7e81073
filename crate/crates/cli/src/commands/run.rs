use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ehpo_core::hpo::{load_log, run_hpo, save_log, scout_hyper_hps};
use ehpo_core::logic::{check_derivation, fixture, Derivation};
use ehpo_core::reasoners::naive_conclude;

use crate::config::ExperimentConfig;
use crate::output::write_json;

/// Run the named HPO config and write `logs/<name>.ndjson`.
pub fn run(cfg: &ExperimentConfig, name: &str) -> Result<PathBuf> {
    let config = cfg.find(name)?;
    let log = run_hpo(&cfg.task, &cfg.algorithms(), config, cfg.master_seed)?;
    let path = cfg.out_dir().join("logs").join(format!("{name}.ndjson"));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    save_log(&log, &path).with_context(|| format!("writing {}", path.display()))?;
    println!("best hp:     {}", log.best_hp());
    println!("best metric: {}", log.best_metric());
    println!("time (T):    {}", log.total_time());
    println!("log:         {}", path.display());
    Ok(path)
}

pub fn conclude(cfg: &ExperimentConfig, paths: &[PathBuf]) -> Result<()> {
    let logs = paths
        .iter()
        .map(|p| load_log(p).with_context(|| format!("reading log {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let set = naive_conclude(&logs, &cfg.policy)?;
    if set.is_empty() {
        println!("nothing");
    }
    for f in set.iter() {
        println!("{f}");
    }
    Ok(())
}

/// Check a derivation file, or a bundled one named `builtin:<name>`.
pub fn verify_proof(source: &str) -> Result<()> {
    let text = match source.strip_prefix("builtin:") {
        Some(name) => match fixture(name) {
            Some(t) => t.to_string(),
            None => bail!("no bundled derivation named `{name}`"),
        },
        None => {
            fs::read_to_string(Path::new(source)).with_context(|| format!("reading {source}"))?
        }
    };
    let d = Derivation::parse(&text)?;
    check_derivation(&d)?;
    println!("ok: {} steps verified", d.steps.len());
    if let Some(c) = d.conclusion() {
        println!("concludes: {c}");
    }
    Ok(())
}

pub fn scout(cfg: &ExperimentConfig) -> Result<()> {
    let Some(s) = &cfg.scout else {
        bail!("config has no [scout] section");
    };
    let report = scout_hyper_hps(
        &cfg.task,
        &s.algorithm,
        &s.dim,
        &s.fixed,
        (s.lo, s.hi),
        s.n,
        s.max_rounds,
        cfg.master_seed,
    )?;
    let path = cfg.out_dir().join("scout.json");
    write_json(&path, &report)?;
    println!("range:  [{:e}, {:e}]", report.lo, report.hi);
    println!("rounds: {} ({:?})", report.rounds, report.stop);
    if let Some((x, m)) = report.best {
        println!("best:   {}={x:e} metric {m}", s.dim);
    }
    Ok(())
}

use anyhow::{Context, Result};
use ehpo_core::certifier::{allowable_distributions, certify as build, Certificate};

use crate::config::ExperimentConfig;
use crate::output::write_json;

pub type CertifyReport = Certificate;

/// Certificate for the allowable random-search distributions of `cfg`.
pub fn certify_config(cfg: &ExperimentConfig) -> Result<Certificate> {
    let section = cfg.certify();
    let k = cfg
        .defense
        .as_ref()
        .context("certify needs a [defense] section for K")?
        .k;
    let allowable = cfg.allowable(section.allowable.as_ref())?;
    let (dists, grid) = allowable_distributions(&allowable)?;
    let mut cert = build(
        &dists,
        cfg.budget,
        k,
        section.audit_samples,
        cfg.master_seed,
    )?;
    cert.discretization = grid;
    Ok(cert)
}

pub fn certify(cfg: &ExperimentConfig) -> Result<Certificate> {
    let cert = certify_config(cfg)?;
    println!("gamma = {} nats", cert.gamma);
    println!("K = {}, t = {}", cert.k, cert.t);
    println!("R = {}", cert.r);
    if let Some(d) = &cert.discretization {
        println!(
            "discretized `{}` onto {} cells over [{:e}, {:e}]",
            d.dim, d.cells, d.lo, d.hi
        );
    }
    for c in &cert.checks {
        println!(
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if let Some(a) = &cert.audit {
        for f in a.flagged_step.iter().filter(|f| !f.holds) {
            println!(
                "note: intermediate step fails at gamma*K={} ({:.4} > {:.4}); not relied on",
                f.gamma_k, f.lhs, f.rhs
            );
        }
    }
    write_json(&cfg.out_dir().join("certificate.json"), &cert)?;
    Ok(cert)
}

use anyhow::{Context, Result};
use ehpo_core::adversary::{
    deception_verdict, simulate_strategy, DeceptionVerdict, Reasoner, Strategy, Target,
    VerdictReport,
};
use ehpo_core::certifier::{allowable_distributions, pairwise_gamma, required_r};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ReasonerKind};
use crate::output::{fmt_time, write_json};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub target: Target,
    pub config: String,
    pub repetitions: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_elapsed: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasonerVerdict {
    pub reasoner: Reasoner,
    #[serde(flatten)]
    pub report: VerdictReport,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub simulations: Vec<SimulationSummary>,
    /// Repetitions in which both p and !p were reached within the budget.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub both_within_budget: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemonReport {
    pub budget: f64,
    pub verdicts: Vec<ReasonerVerdict>,
}

/// Group count for the defended reasoner: configured, or the smallest R
/// certified for the allowable random-search distributions.
pub fn defended_r(cfg: &ExperimentConfig) -> Result<usize> {
    let demon = cfg.demon();
    if let Some(r) = demon.defended_r {
        return Ok(r);
    }
    let k = cfg
        .defense
        .as_ref()
        .context("the defended reasoner needs a [defense] section")?
        .k;
    let allowable = cfg.allowable(demon.allowable.as_ref())?;
    let (dists, _) = allowable_distributions(&allowable)?;
    let gamma = pairwise_gamma(&dists)?;
    Ok(usize::try_from(required_r(cfg.budget, gamma, k)?)?)
}

fn simulate(
    cfg: &ExperimentConfig,
    reasoner: &Reasoner,
    report: &VerdictReport,
    n: usize,
) -> Result<(Vec<SimulationSummary>, usize)> {
    let (wp, wn) = match &report.verdict {
        DeceptionVerdict::Deceptive {
            witness_p,
            witness_not_p,
        } => (witness_p, witness_not_p),
        DeceptionVerdict::CertifiedNonDeceptive {
            fastest_p,
            fastest_not_p,
        } => (fastest_p, fastest_not_p),
    };
    let budget = cfg.budget.floor() as u64;
    let mut sims = Vec::new();
    let mut outcomes = Vec::new();
    for (target, witness) in [(Target::P, wp), (Target::NotP, wn)] {
        let strategy = Strategy::RerunUntilSuccess {
            config: cfg.find(&witness.config)?.clone(),
            target,
            budget: Some(budget),
        };
        let rep = simulate_strategy(&cfg.task, &strategy, reasoner, cfg.master_seed, n)?;
        sims.push(SimulationSummary {
            target,
            config: witness.config.clone(),
            repetitions: rep.repetitions,
            successes: rep.successes,
            success_rate: rep.success_rate,
            mean_elapsed: rep.mean_elapsed,
            std_error: rep.std_error,
        });
        outcomes.push(rep.outcomes);
    }
    let both = outcomes[0]
        .iter()
        .zip(&outcomes[1])
        .filter(|(a, b)| a.success && b.success)
        .count();
    Ok((sims, both))
}

pub fn demon(cfg: &ExperimentConfig) -> Result<DemonReport> {
    let section = cfg.demon();
    let allowable = cfg.allowable(section.allowable.as_ref())?;
    let mode = section.mode(cfg.master_seed);
    let mut verdicts = Vec::new();
    for kind in &section.reasoners {
        let reasoner = match kind {
            ReasonerKind::Naive => Reasoner::Naive {
                policy: cfg.policy.clone(),
            },
            ReasonerKind::Defended => Reasoner::Defended {
                policy: cfg.policy.clone(),
                k: cfg.defense.as_ref().context("missing [defense]")?.k,
                r: defended_r(cfg)?,
            },
        };
        let report = deception_verdict(&cfg.task, &allowable, &reasoner, cfg.budget, mode)?;
        let (simulations, both) = if section.simulations > 0 {
            let (s, b) = simulate(cfg, &reasoner, &report, section.simulations)?;
            (s, Some(b))
        } else {
            (Vec::new(), None)
        };
        verdicts.push(ReasonerVerdict {
            reasoner,
            report,
            simulations,
            both_within_budget: both,
        });
    }
    print_table(&verdicts, cfg.budget);
    let out = DemonReport {
        budget: cfg.budget,
        verdicts,
    };
    write_json(&cfg.out_dir().join("verdict.json"), &out)?;
    Ok(out)
}

fn print_table(verdicts: &[ReasonerVerdict], budget: f64) {
    println!("budget t = {budget}");
    println!(
        "{:<10} {:<24} {:<28} {:<28}",
        "reasoner", "verdict", "p (config, time)", "!p (config, time)"
    );
    for v in verdicts {
        let name = match &v.reasoner {
            Reasoner::Naive { .. } => "naive".to_string(),
            Reasoner::Defended { k, r, .. } => format!("K={k},R={r}"),
        };
        let (label, wp, wn) = match &v.report.verdict {
            DeceptionVerdict::Deceptive {
                witness_p,
                witness_not_p,
            } => ("Deceptive", witness_p, witness_not_p),
            DeceptionVerdict::CertifiedNonDeceptive {
                fastest_p,
                fastest_not_p,
            } => ("CertifiedNonDeceptive", fastest_p, fastest_not_p),
        };
        println!(
            "{:<10} {:<24} {:<28} {:<28}",
            name,
            label,
            format!("{} ({})", wp.config, fmt_time(wp.expected_time)),
            format!("{} ({})", wn.config, fmt_time(wn.expected_time)),
        );
        for s in &v.simulations {
            println!(
                "  rerun {:?} with {}: {}/{} within budget, mean elapsed {:.3} (se {:.3})",
                s.target, s.config, s.successes, s.repetitions, s.mean_elapsed, s.std_error
            );
        }
        if let Some(b) = v.both_within_budget {
            println!("  both conclusions within budget: {b}");
        }
    }
}

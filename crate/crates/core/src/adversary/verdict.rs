use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{convince_probability, AdversaryError, Mode, Reasoner, Target};
use crate::hpo::{HyperHpConfig, SyntheticTask};

/// Expected time `k * r / q^r` to obtain one log of `r` groups (each costing
/// `k`) in which every group succeeds with probability `q`. Infinite when
/// `q == 0`. Computed in log space when `q^r` underflows.
pub fn expected_convince_time(q: f64, k: u64, r: u64) -> f64 {
    if q <= 0.0 || k == 0 || r == 0 {
        return if q <= 0.0 { f64::INFINITY } else { 0.0 };
    }
    let cost = k as f64 * r as f64;
    let qr = q.powf(r as f64);
    if qr > 1e-300 {
        cost / qr
    } else {
        (cost.ln() - r as f64 * q.ln()).exp()
    }
}

fn ser_time<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
    if t.is_finite() {
        s.serialize_some(t)
    } else {
        s.serialize_none()
    }
}

fn de_time<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// Odds of one allowable configuration. Times are `null` when unreachable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigOdds {
    pub config: String,
    /// Per-attempt probabilities of forcing p and !p.
    pub q_p: f64,
    pub q_not_p: f64,
    /// Trials spent per attempt.
    pub cost: u64,
    #[serde(serialize_with = "ser_time", deserialize_with = "de_time")]
    pub time_p: f64,
    #[serde(serialize_with = "ser_time", deserialize_with = "de_time")]
    pub time_not_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvincingOdds {
    pub reasoner: String,
    pub configs: Vec<ConfigOdds>,
    /// Best per-attempt odds over all configurations.
    pub q: f64,
    pub q_not: f64,
}

impl ConvincingOdds {
    /// Best per-attempt odds of forcing `target` over all configurations.
    pub fn best_q(&self, target: Target) -> f64 {
        self.configs
            .iter()
            .map(|c| match target {
                Target::P => c.q_p,
                Target::NotP => c.q_not_p,
            })
            .fold(0.0, f64::max)
    }

    /// Fastest configuration for `target`; the first one listed wins ties.
    pub fn fastest(&self, target: Target) -> Witness {
        let time = |c: &ConfigOdds| match target {
            Target::P => c.time_p,
            Target::NotP => c.time_not_p,
        };
        let mut best = &self.configs[0];
        for c in &self.configs[1..] {
            if time(c) < time(best) {
                best = c;
            }
        }
        Witness {
            config: best.config.clone(),
            expected_time: time(best),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub config: String,
    #[serde(serialize_with = "ser_time", deserialize_with = "de_time")]
    pub expected_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DeceptionVerdict {
    /// Both conclusions are reachable within the budget.
    Deceptive {
        witness_p: Witness,
        witness_not_p: Witness,
    },
    /// At least one conclusion needs more than the budget in expectation.
    CertifiedNonDeceptive {
        fastest_p: Witness,
        fastest_not_p: Witness,
    },
}

impl DeceptionVerdict {
    pub fn is_deceptive(&self) -> bool {
        matches!(self, DeceptionVerdict::Deceptive { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub budget: f64,
    #[serde(flatten)]
    pub verdict: DeceptionVerdict,
    pub odds: ConvincingOdds,
}

fn odds_for(
    task: &SyntheticTask,
    name: &str,
    config: &HyperHpConfig,
    reasoner: &Reasoner,
    mode: Mode,
) -> Result<ConfigOdds, AdversaryError> {
    let m = reasoner.algorithms().len() as u64;
    let naive = Reasoner::Naive {
        policy: reasoner.policy().clone(),
    };
    // Per-group odds and group layout of one attempt.
    let (group, k, r) = match reasoner {
        Reasoner::Naive { .. } => (Some(config.clone()), config.rounds() as u64, 1u64),
        Reasoner::Defended { k, r, .. } => (config.with_trials(*k), *k as u64, *r as u64),
    };
    let cost = k * r * m;
    let mut q = [0.0; 2];
    let mut time = [f64::INFINITY; 2];
    for (i, target) in [Target::P, Target::NotP].into_iter().enumerate() {
        let Some(group) = &group else {
            // Grid under the defended reasoner: never convincing.
            convince_probability(task, config, &naive, target, mode)?;
            continue;
        };
        let qg = if k == 0 || r == 0 {
            0.0
        } else {
            convince_probability(task, group, &naive, target, mode)?.value
        };
        q[i] = qg.powf(r as f64);
        time[i] = expected_convince_time(qg, k * m, r);
    }
    Ok(ConfigOdds {
        config: name.to_string(),
        q_p: q[0],
        q_not_p: q[1],
        cost,
        time_p: time[0],
        time_not_p: time[1],
    })
}

/// Decide whether the demon can force both p and !p within `budget` expected
/// time, minimizing over the allowable configurations.
pub fn deception_verdict(
    task: &SyntheticTask,
    configs: &[(String, HyperHpConfig)],
    reasoner: &Reasoner,
    budget: f64,
    mode: Mode,
) -> Result<VerdictReport, AdversaryError> {
    if configs.is_empty() {
        return Err(AdversaryError::InvalidStrategy(
            "no allowable configurations".into(),
        ));
    }
    reasoner.policy().validate()?;
    let mut odds = ConvincingOdds {
        reasoner: reasoner.name().to_string(),
        configs: configs
            .iter()
            .map(|(name, c)| odds_for(task, name, c, reasoner, mode))
            .collect::<Result<_, _>>()?,
        q: 0.0,
        q_not: 0.0,
    };
    odds.q = odds.best_q(Target::P);
    odds.q_not = odds.best_q(Target::NotP);
    let (wp, wn) = (odds.fastest(Target::P), odds.fastest(Target::NotP));
    let verdict = if wp.expected_time <= budget && wn.expected_time <= budget {
        DeceptionVerdict::Deceptive {
            witness_p: wp,
            witness_not_p: wn,
        }
    } else {
        DeceptionVerdict::CertifiedNonDeceptive {
            fastest_p: wp,
            fastest_not_p: wn,
        }
    };
    Ok(VerdictReport {
        budget,
        verdict,
        odds,
    })
}

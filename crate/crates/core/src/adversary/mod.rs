//! The demon: exact and sampled convince probabilities, deception verdicts
//! over a finite allowable set, and strategy simulation.

mod exact;
mod montecarlo;
mod simulate;
mod verdict;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exact::group_convince_probability;
pub use montecarlo::{attempt_convinces, wilson_interval};
pub use simulate::{
    simulate_strategy, trace_strategy, DemonAction, RepetitionOutcome, SimulationReport, Strategy,
    StrategyTrace, MAX_ATTEMPTS,
};
pub use verdict::{
    deception_verdict, expected_convince_time, ConfigOdds, ConvincingOdds, DeceptionVerdict,
    VerdictReport, Witness,
};

use crate::hpo::{HpoError, HyperHpConfig, Log, SyntheticTask};
use crate::reasoners::{defended_vote, naive_vote, ConclusionPolicy, ReasonerError, Vote};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error(transparent)]
    Hpo(#[from] HpoError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error("exact mode unavailable: {0}; use Monte Carlo mode instead")]
    NotEnumerable(String),
    #[error("strategy did not finish within {0} steps")]
    StepCap(usize),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

/// Conclusion the demon is trying to force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    P,
    NotP,
}

impl Target {
    pub fn vote(self) -> Vote {
        match self {
            Target::P => Vote::P,
            Target::NotP => Vote::NotP,
        }
    }
}

/// How a convince probability is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// Probability estimate; exact values have a zero-width interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub samples: Option<usize>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            lo: value,
            hi: value,
            samples: None,
        }
    }
}

/// The belief function under attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reasoner {
    Naive {
        policy: ConclusionPolicy,
    },
    /// Reads a single random-search log of `k * r` rounds split into `r` groups.
    Defended {
        policy: ConclusionPolicy,
        k: usize,
        r: usize,
    },
}

impl Reasoner {
    pub fn policy(&self) -> &ConclusionPolicy {
        match self {
            Reasoner::Naive { policy } | Reasoner::Defended { policy, .. } => policy,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Reasoner::Naive { .. } => "naive",
            Reasoner::Defended { .. } => "defended",
        }
    }

    /// Algorithms every demon run covers, in log order.
    pub fn algorithms(&self) -> Vec<String> {
        self.policy()
            .algorithms()
            .into_iter()
            .map(String::from)
            .collect()
    }

    /// The config the demon actually runs when it picks `config`: the defended
    /// reasoner only accepts logs of exactly `k * r` rounds.
    pub fn attempt_config(&self, config: &HyperHpConfig) -> HyperHpConfig {
        match self {
            Reasoner::Naive { .. } => config.clone(),
            Reasoner::Defended { k, r, .. } => {
                config.with_trials(k * r).unwrap_or_else(|| config.clone())
            }
        }
    }

    /// Vote on a log set. An empty set concludes nothing; the defended
    /// reasoner concludes nothing unless it sees exactly one log.
    pub fn vote(&self, logs: &[Log]) -> Result<Vote, AdversaryError> {
        match self {
            Reasoner::Naive { policy } => match naive_vote(logs, policy) {
                Err(ReasonerError::EmptyLogs) => Ok(Vote::Nothing),
                other => Ok(other?),
            },
            Reasoner::Defended { policy, k, r } => Ok(match logs {
                [log] => defended_vote(log, *k, *r, policy),
                _ => Vote::Nothing,
            }),
        }
    }
}

/// Probability that a single attempt of `config` convinces `reasoner` of
/// `target`. Exact mode needs a noiseless task and a grid or finite support.
pub fn convince_probability(
    task: &SyntheticTask,
    config: &HyperHpConfig,
    reasoner: &Reasoner,
    target: Target,
    mode: Mode,
) -> Result<Estimate, AdversaryError> {
    match mode {
        Mode::MonteCarlo { samples, seed } => {
            montecarlo::monte_carlo(task, config, reasoner, target, samples, seed)
        }
        Mode::Exact => {
            let q = match reasoner {
                Reasoner::Naive { policy } => {
                    group_convince_probability(task, config, policy, target)?
                }
                Reasoner::Defended { policy, k, r } => match config.with_trials(*k) {
                    // The defended reasoner concludes nothing from a grid log.
                    None => {
                        group_convince_probability(task, config, policy, target)?;
                        0.0
                    }
                    Some(_) if *k == 0 || *r == 0 => 0.0,
                    Some(group) => {
                        let q = group_convince_probability(task, &group, policy, target)?;
                        q.powi(i32::try_from(*r).unwrap_or(i32::MAX))
                    }
                },
            };
            Ok(Estimate::exact(q))
        }
    }
}

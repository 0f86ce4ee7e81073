use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{attempt_convinces, AdversaryError, Reasoner, Target};
use crate::hpo::{run_hpo, HyperHpConfig, Log, SyntheticTask};
use crate::reasoners::Vote;
use crate::seed::child_seed;

/// Attempts allowed to one rerun-until-success repetition without a budget.
pub const MAX_ATTEMPTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum DemonAction {
    RunHpo {
        config: HyperHpConfig,
        seed: u64,
    },
    /// Remove the logs at these positions of the current log set.
    Erase {
        indices: Vec<usize>,
    },
    Return,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum Strategy {
    /// Run `config` with fresh seeds, erasing every log that does not
    /// convince the reasoner of `target`. Stops unsuccessfully once the
    /// next attempt would exceed `budget`.
    RerunUntilSuccess {
        config: HyperHpConfig,
        target: Target,
        #[serde(default)]
        budget: Option<u64>,
    },
    /// A fixed action list; the reasoner votes on whatever logs remain.
    Script {
        actions: Vec<DemonAction>,
        target: Target,
    },
}

impl Strategy {
    pub fn target(&self) -> Target {
        match self {
            Strategy::RerunUntilSuccess { target, .. } | Strategy::Script { target, .. } => *target,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Strategy::RerunUntilSuccess { .. } => "rerun-until-success",
            Strategy::Script { .. } => "script",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionOutcome {
    pub success: bool,
    pub elapsed: u64,
    pub attempts: usize,
}

/// Record of one repetition: the concrete actions taken (with effective
/// seeds), total elapsed time and the logs the reasoner finally sees.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StrategyTrace {
    pub actions: Vec<DemonAction>,
    pub elapsed: u64,
    pub final_logs: Vec<Log>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub strategy: String,
    pub reasoner: String,
    pub target: Target,
    pub repetitions: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_elapsed: f64,
    /// Standard error of `mean_elapsed`.
    pub std_error: f64,
    #[serde(skip)]
    pub outcomes: Vec<RepetitionOutcome>,
}

fn rerun(
    task: &SyntheticTask,
    reasoner: &Reasoner,
    config: &HyperHpConfig,
    target: Target,
    budget: Option<u64>,
    rep_seed: u64,
    mut trace: Option<&mut StrategyTrace>,
) -> Result<RepetitionOutcome, AdversaryError> {
    let attempt = reasoner.attempt_config(config);
    attempt.validate()?;
    let cost = (attempt.rounds() * reasoner.algorithms().len()) as u64;
    let mut out = RepetitionOutcome {
        success: false,
        elapsed: 0,
        attempts: 0,
    };
    loop {
        if budget.is_some_and(|b| out.elapsed + cost > b) {
            return Ok(out);
        }
        if out.attempts >= MAX_ATTEMPTS {
            return Err(AdversaryError::StepCap(MAX_ATTEMPTS));
        }
        let seed = child_seed(rep_seed, out.attempts as u64);
        let hit = attempt_convinces(task, reasoner, config, seed, target)?;
        out.attempts += 1;
        out.elapsed += cost;
        if let Some(t) = trace.as_deref_mut() {
            t.actions.push(DemonAction::RunHpo {
                config: attempt.clone(),
                seed,
            });
            t.elapsed = out.elapsed;
            if hit {
                let log = run_hpo(task, &reasoner.algorithms(), &attempt, seed)?;
                t.final_logs = vec![log];
                t.actions.push(DemonAction::Return);
            } else {
                t.actions.push(DemonAction::Erase { indices: vec![0] });
            }
        }
        if hit {
            out.success = true;
            return Ok(out);
        }
        if !attempt.is_random_search() {
            // A grid log never changes, so rerunning cannot help.
            return match budget {
                Some(b) => {
                    out.attempts = (b / cost) as usize;
                    out.elapsed = out.attempts as u64 * cost;
                    Ok(out)
                }
                None => Err(AdversaryError::StepCap(MAX_ATTEMPTS)),
            };
        }
    }
}

fn script(
    task: &SyntheticTask,
    reasoner: &Reasoner,
    actions: &[DemonAction],
    target: Target,
    rep_seed: u64,
    mut trace: Option<&mut StrategyTrace>,
) -> Result<RepetitionOutcome, AdversaryError> {
    let algorithms = reasoner.algorithms();
    let mut logs: Vec<Log> = Vec::new();
    let mut out = RepetitionOutcome {
        success: false,
        elapsed: 0,
        attempts: 0,
    };
    for action in actions {
        match action {
            DemonAction::RunHpo { config, seed: s } => {
                let eff = child_seed(rep_seed, *s);
                let log = run_hpo(task, &algorithms, config, eff)?;
                out.elapsed += log.total_time();
                out.attempts += 1;
                logs.push(log);
                if let Some(t) = trace.as_deref_mut() {
                    t.actions.push(DemonAction::RunHpo {
                        config: config.clone(),
                        seed: eff,
                    });
                }
            }
            DemonAction::Erase { indices } => {
                let mut sorted = indices.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != indices.len() || sorted.last().is_some_and(|&i| i >= logs.len())
                {
                    return Err(AdversaryError::InvalidStrategy(format!(
                        "erase of {indices:?} with {} logs present",
                        logs.len()
                    )));
                }
                for i in sorted.into_iter().rev() {
                    logs.remove(i);
                }
                if let Some(t) = trace.as_deref_mut() {
                    t.actions.push(action.clone());
                }
            }
            DemonAction::Return => {
                if let Some(t) = trace.as_deref_mut() {
                    t.actions.push(DemonAction::Return);
                }
                break;
            }
        }
    }
    if let Some(t) = trace {
        t.elapsed = out.elapsed;
        t.final_logs = logs.clone();
    }
    out.success = reasoner.vote(&logs)? == target.vote() && target.vote() != Vote::Nothing;
    Ok(out)
}

fn run_once(
    task: &SyntheticTask,
    strategy: &Strategy,
    reasoner: &Reasoner,
    rep_seed: u64,
    trace: Option<&mut StrategyTrace>,
) -> Result<RepetitionOutcome, AdversaryError> {
    match strategy {
        Strategy::RerunUntilSuccess {
            config,
            target,
            budget,
        } => rerun(task, reasoner, config, *target, *budget, rep_seed, trace),
        Strategy::Script { actions, target } => {
            script(task, reasoner, actions, *target, rep_seed, trace)
        }
    }
}

/// Execute repetition `rep` of `strategy` and record every step.
pub fn trace_strategy(
    task: &SyntheticTask,
    strategy: &Strategy,
    reasoner: &Reasoner,
    master_seed: u64,
    rep: u64,
) -> Result<(RepetitionOutcome, StrategyTrace), AdversaryError> {
    let mut trace = StrategyTrace::default();
    let out = run_once(
        task,
        strategy,
        reasoner,
        child_seed(master_seed, rep),
        Some(&mut trace),
    )?;
    Ok((out, trace))
}

/// Run `n` seeded repetitions of `strategy` against `reasoner`. Repetition
/// `i` uses `child_seed(master_seed, i)`, so two strategies simulated with
/// the same master seed share their seed sequences.
pub fn simulate_strategy(
    task: &SyntheticTask,
    strategy: &Strategy,
    reasoner: &Reasoner,
    master_seed: u64,
    n: usize,
) -> Result<SimulationReport, AdversaryError> {
    reasoner.policy().validate()?;
    let outcomes: Vec<RepetitionOutcome> = (0..n)
        .into_par_iter()
        .map(|i| {
            run_once(
                task,
                strategy,
                reasoner,
                child_seed(master_seed, i as u64),
                None,
            )
        })
        .collect::<Result<_, _>>()?;
    let successes = outcomes.iter().filter(|o| o.success).count();
    let total: u128 = outcomes.iter().map(|o| u128::from(o.elapsed)).sum();
    let total_sq: u128 = outcomes.iter().map(|o| u128::from(o.elapsed).pow(2)).sum();
    let n_f = n.max(1) as f64;
    let mean = total as f64 / n_f;
    let var = if n > 1 {
        ((total_sq as f64 - n_f * mean * mean) / (n_f - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SimulationReport {
        strategy: strategy.name().into(),
        reasoner: reasoner.name().into(),
        target: strategy.target(),
        repetitions: n,
        successes,
        success_rate: successes as f64 / n_f,
        mean_elapsed: mean,
        std_error: (var / n_f).sqrt(),
        outcomes,
    })
}

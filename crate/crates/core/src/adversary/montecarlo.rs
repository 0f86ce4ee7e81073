use rayon::prelude::*;

use super::{AdversaryError, Estimate, Reasoner, Target};
use crate::hpo::{run_rounds, HyperHpConfig, SyntheticTask, TrialRecord};
use crate::seed::child_seed;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n` at 95% coverage.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Run one demon attempt of `config` under `seed` and report whether the
/// resulting single log convinces `reasoner` of `target`.
///
/// Votes are taken on the trials directly. The defended reasoner is evaluated
/// group by group and stops at the first group that does not vote `target`;
/// the outcome equals voting on the full log.
pub fn attempt_convinces(
    task: &SyntheticTask,
    reasoner: &Reasoner,
    config: &HyperHpConfig,
    seed: u64,
    target: Target,
) -> Result<bool, AdversaryError> {
    let algorithms = reasoner.algorithms();
    let config = reasoner.attempt_config(config);
    let vote = |trials: &[TrialRecord]| {
        reasoner.policy().decide(|a| {
            trials
                .iter()
                .filter(|t| t.algorithm_id == a)
                .map(|t| t.metric)
                .reduce(f64::max)
        })
    };
    match reasoner {
        Reasoner::Naive { .. } => {
            let trials = run_rounds(task, &algorithms, &config, seed, 0..config.rounds())?;
            Ok(vote(&trials)? == target.vote())
        }
        Reasoner::Defended { k, r, .. } => {
            if !config.is_random_search() || *k == 0 || *r == 0 {
                return Ok(false);
            }
            for g in 0..*r {
                let trials = run_rounds(task, &algorithms, &config, seed, g * k..(g + 1) * k)?;
                if vote(&trials)? != target.vote() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

pub(super) fn monte_carlo(
    task: &SyntheticTask,
    config: &HyperHpConfig,
    reasoner: &Reasoner,
    target: Target,
    samples: usize,
    seed: u64,
) -> Result<Estimate, AdversaryError> {
    reasoner.policy().validate()?;
    let successes = (0..samples)
        .into_par_iter()
        .map(|i| attempt_convinces(task, reasoner, config, child_seed(seed, i as u64), target))
        .try_fold(|| 0usize, |acc, hit| hit.map(|h| acc + usize::from(h)))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (lo, hi) = wilson_interval(successes, samples);
    Ok(Estimate {
        value: if samples == 0 {
            0.0
        } else {
            successes as f64 / samples as f64
        },
        lo,
        hi,
        samples: Some(samples),
    })
}

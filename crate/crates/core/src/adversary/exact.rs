use super::{AdversaryError, Target};
use crate::hpo::{grid_points, HpPoint, HyperHpConfig, SearchDistribution, SyntheticTask};
use crate::reasoners::ConclusionPolicy;

/// Largest DP workload (states times distinct outcomes) per round.
const WORK_CAP: usize = 50_000_000;

fn ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let idx = values
        .iter()
        .map(|v| sorted.partition_point(|s| s < v))
        .collect();
    (sorted, idx)
}

fn means(
    task: &SyntheticTask,
    algorithms: &[&str],
    points: &[HpPoint],
) -> Result<Vec<Vec<f64>>, AdversaryError> {
    algorithms
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|p| {
                    task.check_in_domain(p)?;
                    Ok(task.mean_metric(a, p)?)
                })
                .collect()
        })
        .collect()
}

fn check_enumerable(task: &SyntheticTask, policy: &ConclusionPolicy) -> Result<(), AdversaryError> {
    policy.validate()?;
    for a in policy.algorithms() {
        task.rule(a)?;
    }
    if !task.is_noiseless() {
        return Err(AdversaryError::NotEnumerable(
            "the task has evaluation noise".into(),
        ));
    }
    Ok(())
}

/// Probability that one naive run of `config` (all policy algorithms,
/// noiseless task) votes `target`.
///
/// Grids are deterministic and give 0 or 1. Discrete random search tracks the
/// joint distribution of the per-algorithm best value ranks round by round.
pub fn group_convince_probability(
    task: &SyntheticTask,
    config: &HyperHpConfig,
    policy: &ConclusionPolicy,
    target: Target,
) -> Result<f64, AdversaryError> {
    check_enumerable(task, policy)?;
    config.validate()?;
    let algorithms = policy.algorithms();
    let lookup =
        |best: &[f64]| policy.decide(|a| algorithms.iter().position(|x| *x == a).map(|i| best[i]));
    match config {
        HyperHpConfig::Grid { dims } => {
            let vals = means(task, &algorithms, &grid_points(dims))?;
            let best: Vec<f64> = vals
                .iter()
                .map(|v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .collect();
            Ok(f64::from(u8::from(lookup(&best)? == target.vote())))
        }
        HyperHpConfig::RandomSearch {
            distribution: SearchDistribution::Ranges { .. },
            ..
        } => Err(AdversaryError::NotEnumerable(
            "continuous sampling ranges have no finite support".into(),
        )),
        HyperHpConfig::RandomSearch {
            distribution: SearchDistribution::Discrete(dist),
            trials,
        } => {
            let vals = means(task, &algorithms, dist.support())?;
            let ranked: Vec<(Vec<f64>, Vec<usize>)> = vals.iter().map(|v| ranks(v)).collect();
            let sizes: Vec<usize> = ranked.iter().map(|(s, _)| s.len() + 1).collect();
            let n_states: usize = sizes.iter().product();
            let encode = |r: &[usize]| r.iter().zip(&sizes).fold(0, |acc, (x, n)| acc * n + x);

            // Merge support points that move the state identically.
            let mut moves: Vec<(Vec<usize>, f64)> = Vec::new();
            for (j, w) in dist.weights().iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let key: Vec<usize> = ranked.iter().map(|(_, idx)| idx[j] + 1).collect();
                match moves.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, acc)) => *acc += w,
                    None => moves.push((key, *w)),
                }
            }
            if n_states.saturating_mul(moves.len()) > WORK_CAP {
                return Err(AdversaryError::NotEnumerable(format!(
                    "{n_states} states by {} outcomes is too large",
                    moves.len()
                )));
            }
            let decode = |mut s: usize| {
                let mut r = vec![0; sizes.len()];
                for (slot, n) in r.iter_mut().zip(&sizes).rev() {
                    *slot = s % n;
                    s /= n;
                }
                r
            };
            let mut prob = vec![0.0; n_states];
            prob[0] = 1.0;
            for _ in 0..*trials {
                let mut next = vec![0.0; n_states];
                for (s, p) in prob.iter().enumerate() {
                    if *p == 0.0 {
                        continue;
                    }
                    let cur = decode(s);
                    for (key, w) in &moves {
                        let to: Vec<usize> = cur.iter().zip(key).map(|(a, b)| *a.max(b)).collect();
                        next[encode(&to)] += p * w;
                    }
                }
                prob = next;
            }
            let mut q = 0.0;
            for (s, p) in prob.iter().enumerate() {
                if *p == 0.0 {
                    continue;
                }
                let r = decode(s);
                let best: Vec<f64> = r
                    .iter()
                    .zip(&ranked)
                    .map(|(x, (sorted, _))| sorted[x - 1])
                    .collect();
                if lookup(&best)? == target.vote() {
                    q += p;
                }
            }
            Ok(q.min(1.0))
        }
    }
}

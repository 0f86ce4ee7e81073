use std::ops::Range;

use super::config::{grid_points, sample_point};
use super::{
    eval_trial, HpPoint, HpoError, HyperHpConfig, Log, SplitInfo, SyntheticTask, TrialRecord,
};
use crate::seed::{SeedStream, EVAL_DOMAIN, SAMPLE_DOMAIN};

fn check_algorithms(task: &SyntheticTask, algorithms: &[String]) -> Result<(), HpoError> {
    if algorithms.is_empty() {
        return Err(HpoError::InvalidConfig("no algorithms to run".into()));
    }
    for (i, a) in algorithms.iter().enumerate() {
        task.rule(a)?;
        if algorithms[..i].contains(a) {
            return Err(HpoError::InvalidConfig(format!(
                "algorithm `{a}` listed twice"
            )));
        }
    }
    Ok(())
}

/// HP point of round `i`.
fn round_point(config: &HyperHpConfig, grid: &[HpPoint], master_seed: u64, i: usize) -> HpPoint {
    match config {
        HyperHpConfig::Grid { .. } => grid[i].clone(),
        HyperHpConfig::RandomSearch { distribution, .. } => {
            let mut s = SeedStream::new(master_seed, SAMPLE_DOMAIN | i as u64);
            sample_point(distribution, &mut s)
        }
    }
}

/// Evaluate a contiguous range of rounds of a search.
///
/// Round `i` picks one HP point (grid point `i`, or a draw from sampling stream
/// `i`) and evaluates every algorithm on it, algorithm `j` using evaluation
/// stream `i * m + j`. Running all rounds at once or in pieces gives the same
/// trials.
pub fn run_rounds(
    task: &SyntheticTask,
    algorithms: &[String],
    config: &HyperHpConfig,
    master_seed: u64,
    rounds: Range<usize>,
) -> Result<Vec<TrialRecord>, HpoError> {
    config.validate()?;
    check_algorithms(task, algorithms)?;
    let total = config.rounds();
    if rounds.end > total {
        return Err(HpoError::InvalidConfig(format!(
            "round range {rounds:?} exceeds {total} rounds"
        )));
    }
    let grid = match config {
        HyperHpConfig::Grid { dims } => grid_points(dims),
        HyperHpConfig::RandomSearch { .. } => Vec::new(),
    };
    let m = algorithms.len();
    let mut trials = Vec::with_capacity(rounds.len() * m);
    for i in rounds {
        let hp = round_point(config, &grid, master_seed, i);
        for (j, alg) in algorithms.iter().enumerate() {
            let mut s = SeedStream::new(master_seed, EVAL_DOMAIN | (i * m + j) as u64);
            trials.push(eval_trial(task, alg, &hp, &mut s)?);
        }
    }
    Ok(trials)
}

/// Run one HPO procedure for every listed algorithm and collect the log.
pub fn run_hpo(
    task: &SyntheticTask,
    algorithms: &[String],
    config: &HyperHpConfig,
    master_seed: u64,
) -> Result<Log, HpoError> {
    let trials = run_rounds(task, algorithms, config, master_seed, 0..config.rounds())?;
    Log::new(
        &task.task_id,
        algorithms.to_vec(),
        config.clone(),
        master_seed,
        trials,
    )
}

pub fn run_random_search(
    task: &SyntheticTask,
    algorithm_id: &str,
    config: &HyperHpConfig,
    master_seed: u64,
) -> Result<Log, HpoError> {
    if !config.is_random_search() {
        return Err(HpoError::InvalidConfig(
            "expected a random-search config".into(),
        ));
    }
    run_hpo(task, &[algorithm_id.to_string()], config, master_seed)
}

pub fn run_grid_search(
    task: &SyntheticTask,
    algorithm_id: &str,
    config: &HyperHpConfig,
    master_seed: u64,
) -> Result<Log, HpoError> {
    if config.is_random_search() {
        return Err(HpoError::InvalidConfig("expected a grid config".into()));
    }
    run_hpo(task, &[algorithm_id.to_string()], config, master_seed)
}

/// Split a random-search log into `r` contiguous logs of equal size.
pub fn split_log(log: &Log, r: usize) -> Result<Vec<Log>, HpoError> {
    let header = log.header();
    if !log.is_random_search() {
        return Err(HpoError::Split(
            "only random-search logs have interchangeable trials".into(),
        ));
    }
    let rounds = log.rounds();
    if r == 0 || !rounds.is_multiple_of(r) {
        return Err(HpoError::Split(format!(
            "{rounds} rounds cannot be divided into {r} equal groups"
        )));
    }
    let per = rounds / r;
    let chunk = per * header.algorithms.len();
    let config = header
        .hyper_hp_config
        .with_trials(per)
        .expect("random-search config");
    log.trials()
        .chunks(chunk)
        .enumerate()
        .map(|(part, trials)| {
            Log::new(
                &header.task_id,
                header.algorithms.clone(),
                config.clone(),
                header.master_seed,
                trials.to_vec(),
            )
            .map(|l| l.with_split(SplitInfo { part, parts: r }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::distribution::DiscreteDistribution;
    use crate::hpo::{
        log_to_string, DimDomain, GridDim, MeanFunction, ScoringRule, SearchDistribution,
    };

    fn task() -> SyntheticTask {
        let gauss = |c: f64| ScoringRule {
            mean: MeanFunction::Gaussian {
                center: [("x".to_string(), c)].into(),
                widths: BTreeMap::new(),
                height: 0.9,
                log10: false,
            },
            noise: 0.01,
        };
        SyntheticTask {
            task_id: "two".into(),
            hp_domain: [("x".to_string(), DimDomain::Interval { lo: -3.0, hi: 3.0 })].into(),
            algorithms: [("a".to_string(), gauss(0.0)), ("b".to_string(), gauss(1.0))].into(),
        }
    }

    fn rs(k: usize) -> HyperHpConfig {
        HyperHpConfig::RandomSearch {
            distribution: SearchDistribution::Discrete(
                DiscreteDistribution::new(
                    vec![
                        HpPoint::single("x", -1.0),
                        HpPoint::single("x", 0.0),
                        HpPoint::single("x", 1.0),
                    ],
                    vec![0.2, 0.3, 0.5],
                )
                .unwrap(),
            ),
            trials: k,
        }
    }

    fn both() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    #[test]
    fn rounds_share_hp_across_algorithms() {
        let log = run_hpo(&task(), &both(), &rs(4), 3).unwrap();
        assert_eq!(log.total_time(), 8);
        assert_eq!(log.rounds(), 4);
        for pair in log.trials().chunks(2) {
            assert_eq!(pair[0].hp, pair[1].hp);
            assert_eq!(pair[0].algorithm_id, "a");
            assert_eq!(pair[1].algorithm_id, "b");
        }
    }

    #[test]
    fn pieces_match_whole() {
        let whole = run_rounds(&task(), &both(), &rs(10), 5, 0..10).unwrap();
        let mut pieces = run_rounds(&task(), &both(), &rs(10), 5, 0..4).unwrap();
        pieces.extend(run_rounds(&task(), &both(), &rs(10), 5, 4..10).unwrap());
        assert_eq!(whole, pieces);
    }

    #[test]
    fn deterministic_bytes() {
        let a = log_to_string(&run_hpo(&task(), &both(), &rs(20), 9).unwrap());
        let b = log_to_string(&run_hpo(&task(), &both(), &rs(20), 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn split_partitions_rounds() {
        let log = run_hpo(&task(), &both(), &rs(6), 1).unwrap();
        let parts = split_log(&log, 3).unwrap();
        assert_eq!(parts.len(), 3);
        let joined: Vec<TrialRecord> = parts.iter().flat_map(|p| p.trials().to_vec()).collect();
        assert_eq!(joined, log.trials());
        assert!(parts.iter().all(|p| p.total_time() == 4));
        assert!(split_log(&log, 4).is_err());
        assert!(split_log(&log, 0).is_err());
    }

    #[test]
    fn split_rejects_grid() {
        let cfg = HyperHpConfig::Grid {
            dims: vec![GridDim {
                name: "x".into(),
                points: vec![0.0, 1.0],
            }],
        };
        let log = run_grid_search(&task(), "a", &cfg, 0).unwrap();
        assert!(matches!(split_log(&log, 1), Err(HpoError::Split(_))));
    }

    #[test]
    fn wrapper_variant_checks() {
        assert!(run_grid_search(&task(), "a", &rs(2), 0).is_err());
        assert!(run_hpo(&task(), &["a".into(), "a".into()], &rs(2), 0).is_err());
        assert!(matches!(
            run_random_search(&task(), "zz", &rs(2), 0),
            Err(HpoError::UnknownAlgorithm(_))
        ));
    }
}

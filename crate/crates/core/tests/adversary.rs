use std::collections::BTreeMap;

use ehpo_core::adversary::{
    attempt_convinces, convince_probability, deception_verdict, expected_convince_time,
    group_convince_probability, simulate_strategy, trace_strategy, wilson_interval, AdversaryError,
    DemonAction, Mode, Reasoner, Strategy as DemonStrategy, Target,
};
use ehpo_core::hpo::{
    run_hpo, DimDomain, MeanFunction, RangeDim, Scale, ScoringRule, SearchDistribution, TableEntry,
};
use ehpo_core::reasoners::{defended_vote, ConclusionPolicy, Vote};
use ehpo_core::{DiscreteDistribution, HpPoint, HyperHpConfig, Log, SyntheticTask, TrialRecord};
use proptest::prelude::*;

/// One-dimensional toy task: `x` ranges over `0..n`, algorithm `alg` scores
/// `table[alg][x]`.
fn toy(tables: &[(&str, Vec<f64>)]) -> SyntheticTask {
    let n = tables[0].1.len();
    let mut algorithms = BTreeMap::new();
    for (name, vals) in tables {
        let entries = vals
            .iter()
            .enumerate()
            .map(|(i, v)| TableEntry {
                point: HpPoint::single("x", i as f64),
                value: *v,
            })
            .collect();
        algorithms.insert(
            name.to_string(),
            ScoringRule {
                mean: MeanFunction::Table { entries },
                noise: 0.0,
            },
        );
    }
    let mut hp_domain = BTreeMap::new();
    hp_domain.insert(
        "x".to_string(),
        DimDomain::Points {
            values: (0..n).map(|i| i as f64).collect(),
        },
    );
    SyntheticTask {
        task_id: "toy".into(),
        hp_domain,
        algorithms,
    }
}

fn random_search(weights: &[f64], trials: usize) -> HyperHpConfig {
    let support = (0..weights.len())
        .map(|i| HpPoint::single("x", i as f64))
        .collect();
    HyperHpConfig::RandomSearch {
        distribution: SearchDistribution::Discrete(
            DiscreteDistribution::new(support, weights.to_vec()).unwrap(),
        ),
        trials,
    }
}

/// Independent decision rule, written out rather than calling the policy.
fn oracle_vote(policy: &ConclusionPolicy, best: &BTreeMap<String, f64>) -> Vote {
    match &policy.scheme {
        ehpo_core::reasoners::Scheme::Threshold {
            target_algorithm,
            theta,
        } => {
            if best[target_algorithm] >= *theta {
                Vote::P
            } else {
                Vote::NotP
            }
        }
        ehpo_core::reasoners::Scheme::Comparative {
            algorithm_a,
            algorithm_b,
            margin,
        } => {
            let (a, b) = (best[algorithm_a], best[algorithm_b]);
            if a > b + margin {
                Vote::P
            } else if b > a + margin {
                Vote::NotP
            } else {
                Vote::Nothing
            }
        }
    }
}

fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Brute-force naive convince probability: enumerate every draw tuple.
fn tuple_oracle(
    tables: &[(&str, Vec<f64>)],
    weights: &[f64],
    k: usize,
    policy: &ConclusionPolicy,
    target: Vote,
) -> f64 {
    let mut q = 0.0;
    for t in tuples(weights.len(), k) {
        let p: f64 = t.iter().map(|&x| weights[x]).product();
        let best: BTreeMap<String, f64> = tables
            .iter()
            .map(|(name, vals)| {
                let b = t.iter().map(|&x| vals[x]).fold(f64::NEG_INFINITY, f64::max);
                (name.to_string(), b)
            })
            .collect();
        if oracle_vote(policy, &best) == target {
            q += p;
        }
    }
    q
}

fn weights_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1u32..10, n).prop_map(|w| {
        let s: u32 = w.iter().sum();
        w.iter().map(|x| f64::from(*x) / f64::from(s)).collect()
    })
}

/// Metric levels on a coarse grid so ties and margins actually occur.
fn values_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..=8, n).prop_map(|v| v.iter().map(|x| f64::from(*x) / 8.0).collect())
}

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, usize)> {
    (1usize..=5).prop_flat_map(|n| {
        (
            weights_strategy(n),
            values_strategy(n),
            values_strategy(n),
            1usize..=4,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn exact_naive_matches_tuple_oracle(
        (w, a, b, k) in instance(),
        theta in 0u32..=8,
        margin in 0u32..=2,
    ) {
        let tables = vec![("a", a), ("b", b)];
        let task = toy(&tables);
        let config = random_search(&w, k);
        let policies = [
            ConclusionPolicy::threshold("p", "a", f64::from(theta) / 8.0),
            ConclusionPolicy::comparative("p", "a", "b", f64::from(margin) / 8.0),
        ];
        for policy in &policies {
            for target in [Target::P, Target::NotP] {
                let exact = group_convince_probability(&task, &config, policy, target).unwrap();
                let oracle = tuple_oracle(&tables, &w, k, policy, target.vote());
                prop_assert!((exact - oracle).abs() <= 1e-12, "{exact} vs {oracle}");
            }
        }
    }

    #[test]
    fn verdict_is_monotone_in_budget(
        (w, a, b, k) in instance(),
        t1 in 0.0f64..200.0,
        dt in 0.0f64..200.0,
    ) {
        let task = toy(&[("a", a), ("b", b)]);
        let reasoner = Reasoner::Naive { policy: ConclusionPolicy::comparative("p", "a", "b", 0.0) };
        let configs = vec![("c".to_string(), random_search(&w, k))];
        let lo = deception_verdict(&task, &configs, &reasoner, t1, Mode::Exact).unwrap();
        let hi = deception_verdict(&task, &configs, &reasoner, t1 + dt, Mode::Exact).unwrap();
        prop_assert!(!lo.verdict.is_deceptive() || hi.verdict.is_deceptive());
    }
}

/// Build the log a fixed draw tuple would produce (noiseless, round-major).
fn log_from_tuple(task: &SyntheticTask, algs: &[&str], config: &HyperHpConfig, t: &[usize]) -> Log {
    let mut trials = Vec::new();
    for (i, &x) in t.iter().enumerate() {
        for (j, a) in algs.iter().enumerate() {
            let hp = HpPoint::single("x", x as f64);
            trials.push(TrialRecord {
                algorithm_id: a.to_string(),
                metric: task.mean_metric(a, &hp).unwrap(),
                hp,
                seed_index: (i * algs.len() + j) as u64,
                cost: 1,
            });
        }
    }
    Log::new(
        "toy",
        algs.iter().map(|a| a.to_string()).collect(),
        config.clone(),
        0,
        trials,
    )
    .unwrap()
}

#[test]
fn defended_probability_is_group_power_over_all_tuples() {
    let tables = vec![("a", vec![0.2, 0.7, 0.5]), ("b", vec![0.6, 0.3, 0.5])];
    let task = toy(&tables);
    let w = [0.5, 0.3, 0.2];
    let policy = ConclusionPolicy::comparative("p", "a", "b", 0.0);
    for (k, r) in [(1, 1), (2, 1), (1, 3), (2, 2), (3, 2)] {
        let config = random_search(&w, k * r);
        let reasoner = Reasoner::Defended {
            policy: policy.clone(),
            k,
            r,
        };
        for target in [Target::P, Target::NotP] {
            let mut brute = 0.0;
            for t in tuples(3, k * r) {
                let p: f64 = t.iter().map(|&x| w[x]).product();
                let log = log_from_tuple(&task, &["a", "b"], &config, &t);
                if defended_vote(&log, k, r, &policy) == target.vote() {
                    brute += p;
                }
            }
            let exact = convince_probability(&task, &config, &reasoner, target, Mode::Exact)
                .unwrap()
                .value;
            assert!(
                (exact - brute).abs() < 1e-12,
                "k={k} r={r}: {exact} vs {brute}"
            );
        }
    }
}

#[test]
fn lazy_defended_attempt_matches_full_log() {
    let tables = vec![
        ("a", vec![0.2, 0.7, 0.5, 0.9]),
        ("b", vec![0.6, 0.3, 0.5, 0.8]),
    ];
    let task = SyntheticTask {
        algorithms: task_with_noise(&toy(&tables), 0.1),
        ..toy(&tables)
    };
    let policy = ConclusionPolicy::comparative("p", "a", "b", 0.0);
    let (k, r) = (3, 4);
    let reasoner = Reasoner::Defended {
        policy: policy.clone(),
        k,
        r,
    };
    let config = random_search(&[0.4, 0.3, 0.2, 0.1], 99);
    let algs = reasoner.algorithms();
    let mut agreed = [0usize; 2];
    for seed in 0..400u64 {
        let log = run_hpo(&task, &algs, &reasoner.attempt_config(&config), seed).unwrap();
        let full = defended_vote(&log, k, r, &policy);
        for (i, target) in [Target::P, Target::NotP].into_iter().enumerate() {
            let lazy = attempt_convinces(&task, &reasoner, &config, seed, target).unwrap();
            assert_eq!(lazy, full == target.vote(), "seed {seed}");
            agreed[i] += usize::from(lazy);
        }
    }
    // Both outcomes occur, so the comparison is not vacuous.
    assert!(agreed[0] > 0 && agreed[1] > 0, "{agreed:?}");
}

fn task_with_noise(task: &SyntheticTask, noise: f64) -> BTreeMap<String, ScoringRule> {
    task.algorithms
        .iter()
        .map(|(k, v)| {
            (
                k.clone(),
                ScoringRule {
                    mean: v.mean.clone(),
                    noise,
                },
            )
        })
        .collect()
}

#[test]
fn monte_carlo_intervals_cover_the_exact_value() {
    let tables = vec![("a", vec![0.3, 0.6, 0.9])];
    let task = toy(&tables);
    let policy = ConclusionPolicy::threshold("p", "a", 0.9);
    let reasoner = Reasoner::Naive { policy };
    let config = random_search(&[0.5, 0.3, 0.2], 2);
    let exact = convince_probability(&task, &config, &reasoner, Target::P, Mode::Exact)
        .unwrap()
        .value;
    assert!((exact - (1.0 - 0.8f64.powi(2))).abs() < 1e-15);
    let mut covered = 0;
    for rep in 0..100u64 {
        let est = convince_probability(
            &task,
            &config,
            &reasoner,
            Target::P,
            Mode::MonteCarlo {
                samples: 100_000,
                seed: rep,
            },
        )
        .unwrap();
        covered += usize::from(est.lo <= exact && exact <= est.hi);
    }
    assert!(covered >= 94, "only {covered}/100 intervals cover {exact}");
}

#[test]
fn exact_mode_refuses_noise_and_ranges() {
    let tables = vec![("a", vec![0.3, 0.6])];
    let reasoner = Reasoner::Naive {
        policy: ConclusionPolicy::threshold("p", "a", 0.5),
    };
    let noisy = SyntheticTask {
        algorithms: task_with_noise(&toy(&tables), 0.05),
        ..toy(&tables)
    };
    let err = convince_probability(
        &noisy,
        &random_search(&[0.5, 0.5], 2),
        &reasoner,
        Target::P,
        Mode::Exact,
    );
    assert!(matches!(err, Err(AdversaryError::NotEnumerable(_))));
    let ranges = HyperHpConfig::RandomSearch {
        distribution: SearchDistribution::Ranges {
            dims: vec![RangeDim {
                name: "x".into(),
                lo: 0.0,
                hi: 1.0,
                scale: Scale::Uniform,
            }],
        },
        trials: 2,
    };
    let err = convince_probability(&toy(&tables), &ranges, &reasoner, Target::P, Mode::Exact);
    assert!(matches!(err, Err(AdversaryError::NotEnumerable(_))));
}

#[test]
fn grid_odds_are_zero_or_one() {
    let task = toy(&[("a", vec![0.3, 0.6])]);
    let grid = HyperHpConfig::Grid {
        dims: vec![ehpo_core::hpo::GridDim {
            name: "x".into(),
            points: vec![0.0, 1.0],
        }],
    };
    let policy = ConclusionPolicy::threshold("p", "a", 0.5);
    let naive = Reasoner::Naive {
        policy: policy.clone(),
    };
    let q = |target, r: &Reasoner| {
        convince_probability(&task, &grid, r, target, Mode::Exact)
            .unwrap()
            .value
    };
    assert_eq!(q(Target::P, &naive), 1.0);
    assert_eq!(q(Target::NotP, &naive), 0.0);
    let defended = Reasoner::Defended { policy, k: 1, r: 2 };
    assert_eq!(q(Target::P, &defended), 0.0);
}

#[test]
fn expected_time_cases() {
    assert_eq!(expected_convince_time(1.0, 4, 3), 12.0);
    assert_eq!(expected_convince_time(0.5, 2, 1), 4.0);
    assert_eq!(expected_convince_time(0.0, 2, 1), f64::INFINITY);
    // Underflowing q^r still gives a finite answer computed in log space.
    let t = expected_convince_time(0.1, 1, 305);
    assert!(t.is_finite());
    assert!((t.log10() - (305f64.log10() + 305.0)).abs() < 1e-9);
    assert_eq!(expected_convince_time(0.01, 1, 400), f64::INFINITY);
}

#[test]
fn wilson_interval_shape() {
    let (lo, hi) = wilson_interval(50, 100);
    assert!(lo < 0.5 && 0.5 < hi);
    assert!((hi - lo - 0.1925).abs() < 0.002);
    assert_eq!(wilson_interval(0, 10).0, 0.0);
    assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
}

#[test]
fn rerun_until_success_mean_time_matches_expectation() {
    let task = toy(&[("a", vec![0.3, 0.6, 0.9])]);
    let reasoner = Reasoner::Naive {
        policy: ConclusionPolicy::threshold("p", "a", 0.9),
    };
    let config = random_search(&[0.7, 0.2, 0.1], 2);
    let q = 1.0 - 0.9f64.powi(2);
    let strategy = DemonStrategy::RerunUntilSuccess {
        config,
        target: Target::P,
        budget: None,
    };
    let report = simulate_strategy(&task, &strategy, &reasoner, 11, 20_000).unwrap();
    assert_eq!(report.successes, 20_000);
    let expected = expected_convince_time(q, 2, 1);
    assert!(
        (report.mean_elapsed - expected).abs() < 4.0 * report.std_error,
        "{} vs {expected} (se {})",
        report.mean_elapsed,
        report.std_error
    );
    let again = simulate_strategy(&task, &strategy, &reasoner, 11, 20_000).unwrap();
    assert_eq!(report, again);
}

#[test]
fn budget_caps_rerun() {
    let task = toy(&[("a", vec![0.3, 0.6])]);
    let reasoner = Reasoner::Naive {
        policy: ConclusionPolicy::threshold("p", "a", 0.99),
    };
    let strategy = DemonStrategy::RerunUntilSuccess {
        config: random_search(&[0.5, 0.5], 3),
        target: Target::P,
        budget: Some(10),
    };
    let report = simulate_strategy(&task, &strategy, &reasoner, 1, 50).unwrap();
    assert_eq!(report.successes, 0);
    assert!(report
        .outcomes
        .iter()
        .all(|o| o.elapsed == 9 && o.attempts == 3));
    let grid_task = toy(&[("a", vec![0.3, 0.6])]);
    let grid = HyperHpConfig::Grid {
        dims: vec![ehpo_core::hpo::GridDim {
            name: "x".into(),
            points: vec![0.0, 1.0],
        }],
    };
    let stuck = DemonStrategy::RerunUntilSuccess {
        config: grid,
        target: Target::P,
        budget: None,
    };
    assert!(matches!(
        simulate_strategy(&grid_task, &stuck, &reasoner, 1, 1),
        Err(AdversaryError::StepCap(_))
    ));
}

#[test]
fn script_erases_and_returns() {
    let task = toy(&[("a", vec![0.3, 0.95])]);
    let reasoner = Reasoner::Naive {
        policy: ConclusionPolicy::threshold("p", "a", 0.9),
    };
    let good = HyperHpConfig::RandomSearch {
        distribution: SearchDistribution::Discrete(DiscreteDistribution::point_mass(
            HpPoint::single("x", 1.0),
        )),
        trials: 2,
    };
    let bad = HyperHpConfig::RandomSearch {
        distribution: SearchDistribution::Discrete(DiscreteDistribution::point_mass(
            HpPoint::single("x", 0.0),
        )),
        trials: 2,
    };
    let run = |c: &HyperHpConfig| DemonAction::RunHpo {
        config: c.clone(),
        seed: 0,
    };
    let forced_not_p = DemonStrategy::Script {
        actions: vec![
            run(&good),
            run(&bad),
            DemonAction::Erase { indices: vec![0] },
            DemonAction::Return,
            run(&good),
        ],
        target: Target::NotP,
    };
    let rep = simulate_strategy(&task, &forced_not_p, &reasoner, 3, 4).unwrap();
    assert_eq!(rep.successes, 4);
    assert!(rep.outcomes.iter().all(|o| o.elapsed == 4));
    let bad_erase = DemonStrategy::Script {
        actions: vec![DemonAction::Erase { indices: vec![0] }],
        target: Target::P,
    };
    assert!(matches!(
        simulate_strategy(&task, &bad_erase, &reasoner, 3, 1),
        Err(AdversaryError::InvalidStrategy(_))
    ));
    let dup = DemonStrategy::Script {
        actions: vec![
            run(&good),
            DemonAction::Erase {
                indices: vec![0, 0],
            },
        ],
        target: Target::P,
    };
    assert!(simulate_strategy(&task, &dup, &reasoner, 3, 1).is_err());
    // Erasing everything leaves nothing to conclude from.
    for target in [Target::P, Target::NotP] {
        let wiped = DemonStrategy::Script {
            actions: vec![
                run(&good),
                run(&bad),
                DemonAction::Erase {
                    indices: vec![1, 0],
                },
                DemonAction::Return,
            ],
            target,
        };
        let rep = simulate_strategy(&task, &wiped, &reasoner, 3, 2).unwrap();
        assert_eq!(rep.successes, 0);
        assert!(rep.outcomes.iter().all(|o| o.elapsed == 4));
    }
}

#[test]
fn traces_account_for_every_run() {
    let task = toy(&[("a", vec![0.5, 0.9])]);
    let reasoner = Reasoner::Naive {
        policy: ConclusionPolicy::threshold("p", "a", 0.8),
    };
    let strategy = DemonStrategy::RerunUntilSuccess {
        config: random_search(&[0.8, 0.2], 2),
        target: Target::P,
        budget: None,
    };
    for rep in 0..20 {
        let (out, trace) = trace_strategy(&task, &strategy, &reasoner, 5, rep).unwrap();
        let runs = trace
            .actions
            .iter()
            .filter(|a| matches!(a, DemonAction::RunHpo { .. }))
            .count();
        assert_eq!(runs, out.attempts);
        assert_eq!(trace.elapsed, 2 * runs as u64);
        assert_eq!(trace.final_logs.len(), 1);
        assert_eq!(reasoner.vote(&trace.final_logs).unwrap(), Vote::P);
    }
}

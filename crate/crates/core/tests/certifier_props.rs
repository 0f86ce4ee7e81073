use std::collections::BTreeMap;

use ehpo_core::adversary::{
    convince_probability, deception_verdict, expected_convince_time, DeceptionVerdict, Mode,
    Reasoner, Target,
};
use ehpo_core::certifier::{pairwise_gamma, renyi_inf, required_r};
use ehpo_core::hpo::{DimDomain, MeanFunction, ScoringRule, SearchDistribution, TableEntry};
use ehpo_core::reasoners::ConclusionPolicy;
use ehpo_core::{DiscreteDistribution, HpPoint, HyperHpConfig, SyntheticTask};
use proptest::prelude::*;

fn dist(w: &[f64]) -> DiscreteDistribution {
    let total: f64 = w.iter().sum();
    DiscreteDistribution::new(
        (0..w.len())
            .map(|i| HpPoint::single("x", i as f64))
            .collect(),
        w.iter().map(|x| x / total).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn divergence_is_nonnegative_and_zero_on_self(
        a in prop::collection::vec(0.0f64..1.0, 1..6),
        b in prop::collection::vec(0.01f64..1.0, 1..6),
    ) {
        prop_assume!(a.iter().sum::<f64>() > 0.0);
        let n = a.len().min(b.len());
        let (mu, nu) = (dist(&a[..n]), dist(&b[..n]));
        prop_assume!(mu.weights().iter().sum::<f64>() > 0.0);
        prop_assert_eq!(renyi_inf(&mu, &mu), 0.0);
        prop_assert!(renyi_inf(&mu, &nu) >= 0.0);
        prop_assert!(renyi_inf(&mu, &nu).is_finite());
    }

    #[test]
    fn required_r_is_monotone(
        t in 1.0f64..1e7,
        dt in 0.0f64..1e6,
        g in 0.0f64..2.0,
        dg in 0.0f64..1.0,
        k in 1usize..20,
    ) {
        let base = required_r(t, g, k).unwrap();
        prop_assert!(required_r(t + dt, g, k).unwrap() >= base);
        prop_assert!(required_r(t, g + dg, k).unwrap() >= base);
        let r = base as f64;
        prop_assert!(r * r >= t * (g * k as f64).exp() / k as f64 * (1.0 - 1e-12));
    }

    #[test]
    fn required_r_without_divergence_is_ceil_sqrt(t in 1u64..100_000_000) {
        let want = (t as f64).sqrt().ceil() as u64;
        let want = if (want - 1) * (want - 1) >= t { want - 1 } else { want };
        prop_assert_eq!(required_r(t as f64, 0.0, 1).unwrap(), want);
    }
}

/// Two HP points scoring 0.9 and 0.5 for algorithm `a`.
fn two_point_task() -> SyntheticTask {
    let entries = vec![
        TableEntry {
            point: HpPoint::single("x", 1.0),
            value: 0.9,
        },
        TableEntry {
            point: HpPoint::single("x", 2.0),
            value: 0.5,
        },
    ];
    SyntheticTask {
        task_id: "two-point".into(),
        hp_domain: BTreeMap::from([(
            "x".into(),
            DimDomain::Points {
                values: vec![1.0, 2.0],
            },
        )]),
        algorithms: BTreeMap::from([(
            "a".into(),
            ScoringRule {
                mean: MeanFunction::Table { entries },
                noise: 0.0,
            },
        )]),
    }
}

fn search(w: [f64; 2], k: usize) -> HyperHpConfig {
    HyperHpConfig::RandomSearch {
        distribution: SearchDistribution::Discrete(
            DiscreteDistribution::new(
                vec![HpPoint::single("x", 1.0), HpPoint::single("x", 2.0)],
                w.to_vec(),
            )
            .unwrap(),
        ),
        trials: k,
    }
}

#[test]
fn two_point_odds_and_times() {
    let task = two_point_task();
    let naive = Reasoner::Naive {
        policy: ConclusionPolicy::threshold("p", "a", 0.8),
    };
    let q = |w, k, target| {
        convince_probability(&task, &search(w, k), &naive, target, Mode::Exact)
            .unwrap()
            .value
    };
    assert!((q([0.8, 0.2], 2, Target::P) - 0.96).abs() < 1e-15);
    assert_eq!(q([0.0, 1.0], 1, Target::P), 0.0);
    assert!((q([0.8, 0.2], 2, Target::NotP) - 0.04).abs() < 1e-15);
    assert!((expected_convince_time(0.96, 2, 1) - 2.083_333_333_333_333).abs() < 1e-12);
    assert_eq!(expected_convince_time(1.0, 7, 5), 35.0);
    assert!((expected_convince_time(0.96, 2, 2) - 4.0 / 0.9216).abs() < 1e-12);
}

#[test]
fn verdict_examples_on_two_configs() {
    let task = two_point_task();
    let policy = ConclusionPolicy::threshold("p", "a", 0.8);
    // Chosen so that three draws give p (resp. !p) with probability 0.9.
    let miss_a = 0.1f64.powf(1.0 / 3.0);
    let miss_b = 0.9f64.powf(1.0 / 3.0);
    let configs = vec![
        ("mu-a".to_string(), search([1.0 - miss_a, miss_a], 3)),
        ("mu-b".to_string(), search([1.0 - miss_b, miss_b], 3)),
    ];
    let naive = Reasoner::Naive {
        policy: policy.clone(),
    };
    let report = deception_verdict(&task, &configs, &naive, 100.0, Mode::Exact).unwrap();
    match &report.verdict {
        DeceptionVerdict::Deceptive {
            witness_p,
            witness_not_p,
        } => {
            assert_eq!(witness_p.config, "mu-a");
            assert_eq!(witness_not_p.config, "mu-b");
            assert!((witness_p.expected_time - 3.0 / 0.9).abs() < 1e-9);
            assert!((witness_not_p.expected_time - 3.0 / 0.9).abs() < 1e-9);
        }
        other => panic!("expected deception, got {other:?}"),
    }
    assert!((report.odds.q - 0.9).abs() < 1e-12 && (report.odds.q_not - 0.9).abs() < 1e-12);
    let tight = deception_verdict(&task, &configs, &naive, 1.0, Mode::Exact).unwrap();
    assert!(!tight.verdict.is_deceptive());

    let dists: Vec<DiscreteDistribution> = configs
        .iter()
        .map(|(_, c)| match c {
            HyperHpConfig::RandomSearch {
                distribution: SearchDistribution::Discrete(d),
                ..
            } => d.clone(),
            _ => unreachable!(),
        })
        .collect();
    let gamma = pairwise_gamma(&dists).unwrap();
    let r = required_r(100.0, gamma, 3).unwrap() as usize;
    let defended = Reasoner::Defended { policy, k: 3, r };
    let report = deception_verdict(&task, &configs, &defended, 100.0, Mode::Exact).unwrap();
    assert!(!report.verdict.is_deceptive());
}

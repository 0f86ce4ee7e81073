use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{contradiction_check, pairwise_gamma, renyi_inf, required_r};
use crate::adversary::{group_convince_probability, Target};
use crate::distribution::DiscreteDistribution;
use crate::hpo::{
    DimDomain, HpPoint, HyperHpConfig, MeanFunction, ScoringRule, SearchDistribution,
    SyntheticTask, TableEntry,
};
use crate::reasoners::ConclusionPolicy;
use crate::seed::SeedStream;

const TOLERANCE: f64 = 1e-12;
const ADDITIVITY_STREAMS: u64 = 0;
const Q_BOUND_STREAMS: u64 = 1 << 32;

pub const GRID_T: [f64; 5] = [1e2, 1e3, 1e4, 1e5, 1e6];
pub const GRID_GAMMA_K: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
pub const GRID_K: [usize; 4] = [1, 5, 10, 50];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub name: String,
    pub cases: usize,
    /// Largest observed violation margin (error for equalities).
    pub max_error: f64,
    pub failures: Vec<String>,
}

impl AuditCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Numeric status of the intermediate step `1/(1+e^-x) <= exp(-e^-x)` at
/// `x = gamma * k`. Reported only; the audit does not rely on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedStep {
    pub gamma_k: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub additivity: AuditCheck,
    pub q_bound: AuditCheck,
    pub grid: AuditCheck,
    pub flagged_step: Vec<FlaggedStep>,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.additivity.pass() && self.q_bound.pass() && self.grid.pass()
    }
}

fn random_weights(s: &mut SeedStream, n: usize, allow_zero: bool) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| {
                if allow_zero && s.unit() < 0.2 {
                    0.0
                } else {
                    0.05 + s.unit()
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return raw.iter().map(|w| w / total).collect();
        }
    }
}

fn line(n: usize) -> Vec<HpPoint> {
    (0..n).map(|i| HpPoint::single("x", i as f64)).collect()
}

/// `k`-fold product of `d`, over points with coordinates `x0..x{k-1}`.
fn power(d: &DiscreteDistribution, k: usize) -> DiscreteDistribution {
    let mut atoms: Vec<(Vec<(String, f64)>, f64)> = vec![(Vec::new(), 1.0)];
    for i in 0..k {
        atoms = atoms
            .into_iter()
            .flat_map(|(coords, w)| {
                d.iter().map(move |(p, m)| {
                    let mut c = coords.clone();
                    c.push((format!("x{i}"), p.get("x").unwrap_or(0.0)));
                    (c, w * m)
                })
            })
            .collect();
    }
    let (points, weights): (Vec<HpPoint>, Vec<f64>) = atoms
        .into_iter()
        .map(|(c, w)| (HpPoint::new(c).expect("finite coordinates"), w))
        .unzip();
    DiscreteDistribution::new(points, weights).expect("product of valid distributions")
}

fn additivity(n: usize, seed: u64) -> AuditCheck {
    let results: Vec<(f64, Option<String>)> = (0..n as u64)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut s = SeedStream::new(seed, ADDITIVITY_STREAMS | i);
            let size = 2 + (s.unit() * 2.0) as usize;
            let mu = DiscreteDistribution::new(line(size), random_weights(&mut s, size, true))
                .expect("normalized");
            let nu = DiscreteDistribution::new(line(size), random_weights(&mut s, size, false))
                .expect("normalized");
            let single = renyi_inf(&mu, &nu);
            (1..=5usize).map(move |k| {
                let prod = renyi_inf(&power(&mu, k), &power(&nu, k));
                let err = (prod - k as f64 * single).abs();
                let fail = (err > TOLERANCE)
                    .then(|| format!("pair {i}, K={k}: {prod} vs {}", k as f64 * single));
                (err, fail)
            })
        })
        .collect();
    collect("divergence additivity", results)
}

fn q_bound(n: usize, seed: u64) -> AuditCheck {
    let results: Vec<(f64, Option<String>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = SeedStream::new(seed, Q_BOUND_STREAMS | i);
            let size = 2 + (s.unit() * 3.0) as usize;
            let levels = |s: &mut SeedStream| -> Vec<f64> {
                (0..size).map(|_| (s.unit() * 9.0).floor() / 8.0).collect()
            };
            let (a, b) = (levels(&mut s), levels(&mut s));
            let task = toy_task(&a, &b);
            let policy = if s.unit() < 0.5 {
                ConclusionPolicy::threshold("p", "a", a[(s.unit() * size as f64) as usize])
            } else {
                ConclusionPolicy::comparative("p", "a", "b", (s.unit() * 3.0).floor() / 8.0)
            };
            let k = 1 + (s.unit() * 3.0) as usize;
            let count = 2 + (s.unit() * 2.0) as usize;
            let dists: Vec<DiscreteDistribution> = (0..count)
                .map(|_| {
                    DiscreteDistribution::new(line(size), random_weights(&mut s, size, false))
                        .expect("normalized")
                })
                .collect();
            let gamma = pairwise_gamma(&dists).expect("full supports");
            let (mut q, mut q_not) = (0.0f64, 0.0f64);
            for d in &dists {
                let config = HyperHpConfig::RandomSearch {
                    distribution: SearchDistribution::Discrete(d.clone()),
                    trials: k,
                };
                let odds = |t| {
                    group_convince_probability(&task, &config, &policy, t).expect("enumerable toy")
                };
                q = q.max(odds(Target::P));
                q_not = q_not.max(odds(Target::NotP));
            }
            let bound = 2.0 / (1.0 + (-gamma * k as f64).exp());
            let excess = q + q_not - bound;
            let fail = (excess > TOLERANCE)
                .then(|| format!("instance {i}: Q + Q_not = {} > {bound}", q + q_not));
            (excess.max(0.0), fail)
        })
        .collect();
    collect("odds bound", results)
}

fn toy_task(a: &[f64], b: &[f64]) -> SyntheticTask {
    let rule = |vals: &[f64]| ScoringRule {
        mean: MeanFunction::Table {
            entries: vals
                .iter()
                .enumerate()
                .map(|(i, v)| TableEntry {
                    point: HpPoint::single("x", i as f64),
                    value: *v,
                })
                .collect(),
        },
        noise: 0.0,
    };
    SyntheticTask {
        task_id: "audit-toy".into(),
        hp_domain: [(
            "x".to_string(),
            DimDomain::Points {
                values: (0..a.len()).map(|i| i as f64).collect(),
            },
        )]
        .into(),
        algorithms: [("a".to_string(), rule(a)), ("b".to_string(), rule(b))].into(),
    }
}

fn grid() -> AuditCheck {
    let mut results = Vec::new();
    for t in GRID_T {
        for gk in GRID_GAMMA_K {
            for k in GRID_K {
                let gamma = gk / k as f64;
                let res = required_r(t, gamma, k).map(|r| (r, contradiction_check(t, gamma, k, r)));
                results.push(match res {
                    Ok((_, c)) if c.pass => ((c.rhs - c.lhs).max(0.0), None),
                    Ok((r, c)) => (
                        c.rhs - c.lhs,
                        Some(format!(
                            "t={t}, gamma*K={gk}, K={k}, R={r}: {} <= {}",
                            c.lhs, c.rhs
                        )),
                    ),
                    Err(e) => (
                        f64::INFINITY,
                        Some(format!("t={t}, gamma*K={gk}, K={k}: {e}")),
                    ),
                });
            }
        }
    }
    collect("contradiction grid", results)
}

fn collect(name: &str, results: Vec<(f64, Option<String>)>) -> AuditCheck {
    AuditCheck {
        name: name.into(),
        cases: results.len(),
        max_error: results.iter().map(|r| r.0).fold(0.0, f64::max),
        failures: results.into_iter().filter_map(|r| r.1).collect(),
    }
}

/// Audit the chain from bounded divergence to non-deception on `n` random
/// instances: divergence additivity over K-fold products, the bound on the
/// combined odds of p and !p, and the final contradiction over a fixed grid.
pub fn proof_chain_audit(n: usize, seed: u64) -> AuditReport {
    let flagged_step = GRID_GAMMA_K
        .iter()
        .map(|&x| {
            let lhs = 1.0 / (1.0 + (-x).exp());
            let rhs = (-(-x).exp()).exp();
            FlaggedStep {
                gamma_k: x,
                lhs,
                rhs,
                holds: lhs <= rhs,
            }
        })
        .collect();
    AuditReport {
        additivity: additivity(n, seed),
        q_bound: q_bound(n, seed),
        grid: grid(),
        flagged_step,
    }
}

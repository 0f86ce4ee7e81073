//! Subsampled-majority defense with a skepticism threshold.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{naive_vote, ConclusionPolicy, ReasonerError, Vote};
use crate::hpo::Log;
use crate::logic::{ConclusionSet, Formula};
use crate::seed::{SeedStream, SUBSAMPLE_DOMAIN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefenseParams {
    /// Trials (rounds) per group.
    pub k: usize,
    /// Number of groups.
    pub r: usize,
    /// Subsample size.
    pub kappa: usize,
    /// Subsampling iterations.
    pub sample_budget: usize,
    /// Skepticism: conclude only at a fraction of at least `1 - delta`.
    pub delta: f64,
}

impl DefenseParams {
    pub fn validate(&self) -> Result<(), ReasonerError> {
        if self.kappa.is_multiple_of(2) {
            return Err(ReasonerError::EvenKappa(self.kappa));
        }
        if self.kappa > self.r {
            return Err(ReasonerError::KappaTooLarge {
                kappa: self.kappa,
                groups: self.r,
            });
        }
        if self.k == 0 || self.sample_budget == 0 {
            return Err(ReasonerError::InvalidDefense(
                "k and sample_budget must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(ReasonerError::InvalidDefense(format!(
                "delta {} outside [0, 1]",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Share of subsampling iterations ending in each vote.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fractions {
    pub p: f64,
    pub not_p: f64,
    pub nothing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum DefenseOutcome {
    Concluded { formula: Formula },
    Nothing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseDecision {
    pub threshold: f64,
    pub fractions: Fractions,
    #[serde(flatten)]
    pub outcome: DefenseOutcome,
}

/// Strict plurality among p, !p and nothing; any tie is nothing.
pub fn majority_votes(votes: &[Vote]) -> Result<Vote, ReasonerError> {
    if votes.len().is_multiple_of(2) {
        return Err(ReasonerError::EvenKappa(votes.len()));
    }
    let count = |v: Vote| votes.iter().filter(|x| **x == v).count();
    let (p, n, z) = (count(Vote::P), count(Vote::NotP), count(Vote::Nothing));
    Ok(if p > n && p > z {
        Vote::P
    } else if n > p && n > z {
        Vote::NotP
    } else {
        Vote::Nothing
    })
}

/// Majority over conclusion sets, reading each as a vote on `policy`'s
/// proposition.
pub fn majority(sets: &[ConclusionSet], policy: &ConclusionPolicy) -> Result<Vote, ReasonerError> {
    let votes: Vec<Vote> = sets.iter().map(|s| policy.vote_of(s)).collect();
    majority_votes(&votes)
}

/// Fractions of `sample_budget` iterations whose κ-subsample majority is p,
/// !p or nothing. Iteration `m` draws κ distinct groups from its own stream.
pub fn subsample_fractions(
    group_logs: &[Log],
    kappa: usize,
    sample_budget: usize,
    policy: &ConclusionPolicy,
    master_seed: u64,
) -> Result<Fractions, ReasonerError> {
    if kappa.is_multiple_of(2) {
        return Err(ReasonerError::EvenKappa(kappa));
    }
    if kappa > group_logs.len() {
        return Err(ReasonerError::KappaTooLarge {
            kappa,
            groups: group_logs.len(),
        });
    }
    if sample_budget == 0 {
        return Err(ReasonerError::InvalidDefense(
            "sample_budget must be at least 1".into(),
        ));
    }
    let votes = group_logs
        .iter()
        .map(|g| naive_vote(std::slice::from_ref(g), policy))
        .collect::<Result<Vec<Vote>, _>>()?;
    let counts = (0..sample_budget as u64)
        .into_par_iter()
        .map(|m| {
            let mut s = SeedStream::new(master_seed, SUBSAMPLE_DOMAIN | m);
            let picked: Vec<Vote> = index::sample(s.rng(), votes.len(), kappa)
                .into_iter()
                .map(|i| votes[i])
                .collect();
            match majority_votes(&picked).expect("kappa is odd") {
                Vote::P => [1u64, 0, 0],
                Vote::NotP => [0, 1, 0],
                Vote::Nothing => [0, 0, 1],
            }
        })
        .reduce(|| [0, 0, 0], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    let total = sample_budget as f64;
    Ok(Fractions {
        p: counts[0] as f64 / total,
        not_p: counts[1] as f64 / total,
        nothing: counts[2] as f64 / total,
    })
}

/// Conclude p or !p when its fraction is nonzero and at least `threshold`
/// (that is, `1 - delta`). If both qualify the larger wins; a tie is nothing.
pub fn decide(fractions: &Fractions, threshold: f64, policy: &ConclusionPolicy) -> DefenseDecision {
    let ok = |f: f64| f > 0.0 && f >= threshold;
    let vote = match (ok(fractions.p), ok(fractions.not_p)) {
        (true, false) => Vote::P,
        (false, true) => Vote::NotP,
        (true, true) if fractions.p > fractions.not_p => Vote::P,
        (true, true) if fractions.not_p > fractions.p => Vote::NotP,
        _ => Vote::Nothing,
    };
    DefenseDecision {
        threshold,
        fractions: *fractions,
        outcome: match policy.formula(vote) {
            Some(formula) => DefenseOutcome::Concluded { formula },
            None => DefenseOutcome::Nothing,
        },
    }
}

pub fn subsample_majority_defend(
    group_logs: &[Log],
    params: &DefenseParams,
    policy: &ConclusionPolicy,
    master_seed: u64,
) -> Result<DefenseDecision, ReasonerError> {
    if params.kappa.is_multiple_of(2) {
        return Err(ReasonerError::EvenKappa(params.kappa));
    }
    if !(0.0..=1.0).contains(&params.delta) {
        return Err(ReasonerError::InvalidDefense(format!(
            "delta {} outside [0, 1]",
            params.delta
        )));
    }
    let fractions = subsample_fractions(
        group_logs,
        params.kappa,
        params.sample_budget,
        policy,
        master_seed,
    )?;
    Ok(decide(&fractions, 1.0 - params.delta, policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn pol() -> ConclusionPolicy {
        ConclusionPolicy::comparative("p", "a", "b", 0.0)
    }

    fn fr(p: f64, not_p: f64) -> Fractions {
        Fractions {
            p,
            not_p,
            nothing: (1.0 - p - not_p).max(0.0),
        }
    }

    fn outcome(p: f64, not_p: f64, thr: f64) -> DefenseOutcome {
        decide(&fr(p, not_p), thr, &pol()).outcome
    }

    #[test]
    fn table_rows() {
        let not_p = DefenseOutcome::Concluded {
            formula: parse_formula("!p").unwrap(),
        };
        assert_eq!(outcome(0.213, 0.788, 0.75), not_p);
        assert_eq!(outcome(0.213, 0.788, 0.8), DefenseOutcome::Nothing);
        assert_eq!(outcome(0.168, 0.832, 0.8), not_p);
    }

    #[test]
    fn zero_threshold_takes_plurality() {
        assert_eq!(
            outcome(0.3, 0.1, 0.0),
            DefenseOutcome::Concluded {
                formula: parse_formula("p").unwrap()
            }
        );
        assert_eq!(outcome(0.3, 0.3, 0.0), DefenseOutcome::Nothing);
        assert_eq!(outcome(0.0, 0.0, 0.0), DefenseOutcome::Nothing);
    }

    #[test]
    fn majority_examples() {
        use Vote::*;
        let mut v = vec![P; 6];
        v.extend([NotP; 5]);
        assert_eq!(majority_votes(&v), Ok(P));
        let mut w = vec![P; 4];
        w.extend([NotP; 4]);
        w.extend([Nothing; 3]);
        assert_eq!(majority_votes(&w), Ok(Nothing));
        assert_eq!(majority_votes(&[NotP; 11]), Ok(NotP));
        assert_eq!(majority_votes(&[P, P, Nothing, Nothing, NotP]), Ok(Nothing));
        assert_eq!(majority_votes(&[P; 10]), Err(ReasonerError::EvenKappa(10)));
    }

    #[test]
    fn majority_over_sets() {
        let p: ConclusionSet = vec![parse_formula("p").unwrap()].into();
        let q: ConclusionSet = vec![parse_formula("!p").unwrap()].into();
        assert_eq!(majority(&[p.clone(), q, p], &pol()), Ok(Vote::P));
    }

    #[test]
    fn params_validation() {
        let ok = DefenseParams {
            k: 3,
            r: 200,
            kappa: 11,
            sample_budget: 10_000,
            delta: 0.2,
        };
        assert_eq!(ok.validate(), Ok(()));
        assert_eq!(
            DefenseParams {
                kappa: 10,
                ..ok.clone()
            }
            .validate(),
            Err(ReasonerError::EvenKappa(10))
        );
        assert!(DefenseParams {
            kappa: 201,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(DefenseParams { delta: 1.5, ..ok }.validate().is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::ReasonerError;
use crate::hpo::{split_log, Log};
use crate::logic::{atom, not, ConclusionSet, Formula};

/// How best metrics turn into a verdict on the proposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scheme {
    /// p iff the target's best metric is at least `theta`.
    Threshold {
        target_algorithm: String,
        theta: f64,
    },
    /// p iff `best_a > best_b + margin`, !p iff `best_b > best_a + margin`.
    Comparative {
        algorithm_a: String,
        algorithm_b: String,
        #[serde(default)]
        margin: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConclusionPolicy {
    pub proposition: String,
    #[serde(flatten)]
    pub scheme: Scheme,
}

/// A reasoner's stance on one proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Vote {
    P,
    NotP,
    Nothing,
}

impl Vote {
    pub fn negate(self) -> Vote {
        match self {
            Vote::P => Vote::NotP,
            Vote::NotP => Vote::P,
            Vote::Nothing => Vote::Nothing,
        }
    }
}

impl ConclusionPolicy {
    pub fn threshold(proposition: &str, target_algorithm: &str, theta: f64) -> Self {
        Self {
            proposition: proposition.to_string(),
            scheme: Scheme::Threshold {
                target_algorithm: target_algorithm.to_string(),
                theta,
            },
        }
    }

    pub fn comparative(proposition: &str, a: &str, b: &str, margin: f64) -> Self {
        Self {
            proposition: proposition.to_string(),
            scheme: Scheme::Comparative {
                algorithm_a: a.to_string(),
                algorithm_b: b.to_string(),
                margin,
            },
        }
    }

    pub fn validate(&self) -> Result<(), ReasonerError> {
        let ok_name = !self.proposition.is_empty()
            && self
                .proposition
                .starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
            && self
                .proposition
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
            && self.proposition != "B";
        if !ok_name {
            return Err(ReasonerError::InvalidPolicy(format!(
                "proposition `{}` is not an atom name",
                self.proposition
            )));
        }
        match &self.scheme {
            Scheme::Threshold { theta, .. } if !(0.0..=1.0).contains(theta) => Err(
                ReasonerError::InvalidPolicy(format!("theta {theta} outside [0, 1]")),
            ),
            Scheme::Comparative { margin, .. } if !(margin.is_finite() && *margin >= 0.0) => Err(
                ReasonerError::InvalidPolicy(format!("margin {margin} must be finite and >= 0")),
            ),
            _ => Ok(()),
        }
    }

    /// Algorithms the policy reads.
    pub fn algorithms(&self) -> Vec<&str> {
        match &self.scheme {
            Scheme::Threshold {
                target_algorithm, ..
            } => vec![target_algorithm],
            Scheme::Comparative {
                algorithm_a,
                algorithm_b,
                ..
            } => vec![algorithm_a, algorithm_b],
        }
    }

    pub fn p(&self) -> Formula {
        atom(&self.proposition)
    }

    pub fn not_p(&self) -> Formula {
        not(self.p())
    }

    /// The formula a vote stands for.
    pub fn formula(&self, vote: Vote) -> Option<Formula> {
        match vote {
            Vote::P => Some(self.p()),
            Vote::NotP => Some(self.not_p()),
            Vote::Nothing => None,
        }
    }

    /// Read a vote back from a conclusion set.
    pub fn vote_of(&self, set: &ConclusionSet) -> Vote {
        match (set.contains(&self.p()), set.contains(&self.not_p())) {
            (true, false) => Vote::P,
            (false, true) => Vote::NotP,
            _ => Vote::Nothing,
        }
    }

    /// Apply the scheme to a lookup of best metrics.
    pub fn decide(&self, best: impl Fn(&str) -> Option<f64>) -> Result<Vote, ReasonerError> {
        let get = |a: &str| best(a).ok_or_else(|| ReasonerError::MissingAlgorithm(a.to_string()));
        Ok(match &self.scheme {
            Scheme::Threshold {
                target_algorithm,
                theta,
            } => {
                if get(target_algorithm)? >= *theta {
                    Vote::P
                } else {
                    Vote::NotP
                }
            }
            Scheme::Comparative {
                algorithm_a,
                algorithm_b,
                margin,
            } => {
                let (a, b) = (get(algorithm_a)?, get(algorithm_b)?);
                if a > b + margin {
                    Vote::P
                } else if b > a + margin {
                    Vote::NotP
                } else {
                    Vote::Nothing
                }
            }
        })
    }
}

fn best_over(logs: &[Log], algorithm: &str) -> Option<f64> {
    logs.iter()
        .filter_map(|l| l.best_metric_for(algorithm))
        .reduce(f64::max)
}

/// The naive reasoner's vote: the policy applied to the best metric per
/// algorithm over all logs.
pub fn naive_vote(logs: &[Log], policy: &ConclusionPolicy) -> Result<Vote, ReasonerError> {
    if logs.is_empty() {
        return Err(ReasonerError::EmptyLogs);
    }
    policy.decide(|a| best_over(logs, a))
}

pub fn naive_conclude(
    logs: &[Log],
    policy: &ConclusionPolicy,
) -> Result<ConclusionSet, ReasonerError> {
    let vote = naive_vote(logs, policy)?;
    Ok(policy.formula(vote).into_iter().collect())
}

/// The (K,R)-defended reasoner's vote: the common naive vote of all `r`
/// groups, or nothing when the groups disagree or the log has the wrong shape.
pub fn defended_vote(log: &Log, k: usize, r: usize, policy: &ConclusionPolicy) -> Vote {
    if !log.is_random_search() || r == 0 || log.rounds() != k * r {
        return Vote::Nothing;
    }
    let Ok(groups) = split_log(log, r) else {
        return Vote::Nothing;
    };
    let mut common = None;
    for g in &groups {
        let Ok(v) = naive_vote(std::slice::from_ref(g), policy) else {
            return Vote::Nothing;
        };
        match common {
            None => common = Some(v),
            Some(c) if c == v => {}
            Some(_) => return Vote::Nothing,
        }
    }
    common.unwrap_or(Vote::Nothing)
}

/// Intersection of the naive conclusions over the `r` groups of `log`.
pub fn defended_conclude(
    log: &Log,
    k: usize,
    r: usize,
    policy: &ConclusionPolicy,
) -> ConclusionSet {
    policy
        .formula(defended_vote(log, k, r, policy))
        .into_iter()
        .collect()
}

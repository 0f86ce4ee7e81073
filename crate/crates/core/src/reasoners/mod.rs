//! Conclusion-drawing functions: the naive reasoner, the (K,R)-defended
//! intersection reasoner and the subsampled-majority defense.

mod defense;
mod policy;

use thiserror::Error;

pub use defense::{
    decide, majority, majority_votes, subsample_fractions, subsample_majority_defend,
    DefenseDecision, DefenseOutcome, DefenseParams, Fractions,
};
pub use policy::{
    defended_conclude, defended_vote, naive_conclude, naive_vote, ConclusionPolicy, Scheme, Vote,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReasonerError {
    #[error("no logs to conclude from")]
    EmptyLogs,
    #[error("no trials for algorithm `{0}` in the logs")]
    MissingAlgorithm(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("subsample size {0} is even; it must be odd to avoid ties")]
    EvenKappa(usize),
    #[error("subsample size {kappa} exceeds the {groups} available groups")]
    KappaTooLarge { kappa: usize, groups: usize },
    #[error("invalid defense parameters: {0}")]
    InvalidDefense(String),
}

//! Hyperparameter deception toolkit: reproducible HPO on synthetic tasks,
//! naive and defended reasoners, a budget-bounded adversary, a modal proof
//! kernel and Rényi-divergence certificates.

pub mod adversary;
pub mod certifier;
pub mod distribution;
pub mod hpo;
pub mod logic;
pub mod reasoners;
pub mod seed;

pub use adversary::{Mode, Reasoner, Target};
pub use certifier::Certificate;
pub use distribution::{DiscreteDistribution, DistributionError};
pub use hpo::{HpPoint, HpoError, HyperHpConfig, Log, SyntheticTask, TrialRecord};
pub use logic::Formula;
pub use reasoners::{ConclusionPolicy, Vote};
pub use seed::{child_seed, derive_seed, SeedStream};

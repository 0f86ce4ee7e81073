//! Finite-support distributions over HP points.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hpo::HpPoint;
use crate::seed::SeedStream;

/// Tolerance on the total mass of a distribution.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("distribution has empty support")]
    EmptySupport,
    #[error("support has {support} points but {weights} weights")]
    LengthMismatch { support: usize, weights: usize },
    #[error("weight {index} is negative or not finite: {value}")]
    BadWeight { index: usize, value: f64 },
    #[error("weights sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),
    #[error("support point {0} appears twice")]
    DuplicatePoint(String),
}

/// A probability distribution with finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiscrete", into = "RawDiscrete")]
pub struct DiscreteDistribution {
    support: Vec<HpPoint>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDiscrete {
    support: Vec<HpPoint>,
    weights: Vec<f64>,
}

impl TryFrom<RawDiscrete> for DiscreteDistribution {
    type Error = DistributionError;

    fn try_from(raw: RawDiscrete) -> Result<Self, Self::Error> {
        Self::new(raw.support, raw.weights)
    }
}

impl From<DiscreteDistribution> for RawDiscrete {
    fn from(d: DiscreteDistribution) -> Self {
        RawDiscrete {
            support: d.support,
            weights: d.weights,
        }
    }
}

impl DiscreteDistribution {
    pub fn new(support: Vec<HpPoint>, weights: Vec<f64>) -> Result<Self, DistributionError> {
        if support.is_empty() {
            return Err(DistributionError::EmptySupport);
        }
        if support.len() != weights.len() {
            return Err(DistributionError::LengthMismatch {
                support: support.len(),
                weights: weights.len(),
            });
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(DistributionError::BadWeight { index, value });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(DistributionError::NotNormalized(total));
        }
        for (i, a) in support.iter().enumerate() {
            if support[..i].contains(a) {
                return Err(DistributionError::DuplicatePoint(a.to_string()));
            }
        }
        Ok(Self { support, weights })
    }

    /// All mass on one point.
    pub fn point_mass(point: HpPoint) -> Self {
        Self {
            support: vec![point],
            weights: vec![1.0],
        }
    }

    pub fn support(&self) -> &[HpPoint] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HpPoint, f64)> {
        self.support.iter().zip(self.weights.iter().copied())
    }

    /// Mass assigned to `point` (zero when it is not in the support).
    pub fn mass(&self, point: &HpPoint) -> f64 {
        self.mass_hint(point, usize::MAX)
    }

    /// Like [`mass`](Self::mass), checking position `hint` first.
    pub fn mass_hint(&self, point: &HpPoint, hint: usize) -> f64 {
        if self.support.get(hint) == Some(point) {
            return self.weights[hint];
        }
        self.support
            .iter()
            .position(|p| p == point)
            .map_or(0.0, |i| self.weights[i])
    }

    pub(crate) fn sampler(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(&self.weights).expect("validated weights have positive total")
    }

    /// Draw one support index.
    pub fn sample_index(&self, stream: &mut SeedStream) -> usize {
        self.sampler().sample(stream.rng())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::derive_seed;

    fn two_point(a: f64, b: f64) -> DiscreteDistribution {
        DiscreteDistribution::new(
            vec![HpPoint::single("x", 1.0), HpPoint::single("x", 2.0)],
            vec![a, b],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(
            DiscreteDistribution::new(vec![], vec![]),
            Err(DistributionError::EmptySupport)
        );
        assert!(matches!(
            DiscreteDistribution::new(vec![HpPoint::single("x", 1.0)], vec![0.5]),
            Err(DistributionError::NotNormalized(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(
                vec![HpPoint::single("x", 1.0), HpPoint::single("x", 1.0)],
                vec![0.5, 0.5]
            ),
            Err(DistributionError::DuplicatePoint(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(
                vec![HpPoint::single("x", 1.0), HpPoint::single("x", 2.0)],
                vec![1.5, -0.5]
            ),
            Err(DistributionError::BadWeight { index: 1, .. })
        ));
    }

    #[test]
    fn zero_weight_points_are_never_drawn() {
        let d = two_point(1.0, 0.0);
        for i in 0..1000 {
            assert_eq!(d.sample_index(&mut derive_seed(3, i)), 0);
        }
    }

    #[test]
    fn json_roundtrip_revalidates() {
        let d = two_point(0.25, 0.75);
        let s = serde_json::to_string(&d).unwrap();
        let back: DiscreteDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let bad = s.replace("0.75", "0.5");
        assert!(serde_json::from_str::<DiscreteDistribution>(&bad).is_err());
    }
}

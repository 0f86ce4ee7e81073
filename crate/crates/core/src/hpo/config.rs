use serde::{Deserialize, Serialize};

use super::{HpPoint, HpoError};
use crate::distribution::DiscreteDistribution;
use crate::seed::SeedStream;

/// One dimension of a grid: the finite list of values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDim {
    pub name: String,
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Uniform,
    LogUniform,
}

/// A continuous sampling range for one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeDim {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub scale: Scale,
}

impl RangeDim {
    pub(crate) fn transform(&self, x: f64) -> f64 {
        match self.scale {
            Scale::Uniform => x,
            Scale::LogUniform => x.log10(),
        }
    }

    fn inverse(&self, y: f64) -> f64 {
        match self.scale {
            Scale::Uniform => y,
            Scale::LogUniform => 10f64.powf(y),
        }
    }

    /// Cumulative distribution function of this range.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let (a, b) = (self.transform(self.lo), self.transform(self.hi));
        (self.transform(x) - a) / (b - a)
    }

    fn sample(&self, u: f64) -> f64 {
        let (a, b) = (self.transform(self.lo), self.transform(self.hi));
        self.inverse(a + u * (b - a)).clamp(self.lo, self.hi)
    }

    fn validate(&self) -> Result<(), HpoError> {
        let finite = self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi;
        let positive = self.scale == Scale::Uniform || self.lo > 0.0;
        if finite && positive {
            Ok(())
        } else {
            Err(HpoError::InvalidConfig(format!(
                "range for `{}` must satisfy lo < hi (and lo > 0 on a log scale)",
                self.name
            )))
        }
    }
}

/// Sampling distribution of a random search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SearchDistribution {
    Discrete(DiscreteDistribution),
    Ranges { dims: Vec<RangeDim> },
}

impl SearchDistribution {
    pub fn as_discrete(&self) -> Option<&DiscreteDistribution> {
        match self {
            SearchDistribution::Discrete(d) => Some(d),
            SearchDistribution::Ranges { .. } => None,
        }
    }
}

/// An allowable hyper-HP configuration: the input of one HPO procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HyperHpConfig {
    Grid {
        dims: Vec<GridDim>,
    },
    RandomSearch {
        distribution: SearchDistribution,
        trials: usize,
    },
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>) -> Result<(), HpoError> {
    let mut seen: Vec<&str> = Vec::new();
    for n in names {
        if seen.contains(&n) {
            return Err(HpoError::InvalidConfig(format!(
                "dimension `{n}` listed twice"
            )));
        }
        seen.push(n);
    }
    Ok(())
}

impl HyperHpConfig {
    pub fn validate(&self) -> Result<(), HpoError> {
        match self {
            HyperHpConfig::Grid { dims } => {
                if dims.is_empty() {
                    return Err(HpoError::EmptyGrid);
                }
                check_unique(dims.iter().map(|d| d.name.as_str()))?;
                if let Some(d) = dims.iter().find(|d| d.points.is_empty()) {
                    return Err(HpoError::InvalidConfig(format!(
                        "grid dimension `{}` has no points",
                        d.name
                    )));
                }
                if dims.iter().flat_map(|d| &d.points).any(|v| !v.is_finite()) {
                    return Err(HpoError::InvalidConfig("grid point is not finite".into()));
                }
            }
            HyperHpConfig::RandomSearch {
                distribution,
                trials,
            } => {
                if *trials == 0 {
                    return Err(HpoError::InvalidConfig(
                        "random search needs at least one trial".into(),
                    ));
                }
                if let SearchDistribution::Ranges { dims } = distribution {
                    if dims.is_empty() {
                        return Err(HpoError::EmptySupport);
                    }
                    check_unique(dims.iter().map(|d| d.name.as_str()))?;
                    dims.iter().try_for_each(RangeDim::validate)?;
                }
            }
        }
        Ok(())
    }

    pub fn is_random_search(&self) -> bool {
        matches!(self, HyperHpConfig::RandomSearch { .. })
    }

    /// Number of search rounds: trials for random search, grid size for grids.
    pub fn rounds(&self) -> usize {
        match self {
            HyperHpConfig::Grid { dims } => dims.iter().map(|d| d.points.len()).product(),
            HyperHpConfig::RandomSearch { trials, .. } => *trials,
        }
    }

    /// Same configuration with a different trial count (random search only).
    pub fn with_trials(&self, k: usize) -> Option<HyperHpConfig> {
        match self {
            HyperHpConfig::RandomSearch { distribution, .. } => Some(HyperHpConfig::RandomSearch {
                distribution: distribution.clone(),
                trials: k,
            }),
            HyperHpConfig::Grid { .. } => None,
        }
    }

    pub fn procedure_id(&self) -> &'static str {
        match self {
            HyperHpConfig::Grid { .. } => "grid-search",
            HyperHpConfig::RandomSearch { .. } => "random-search",
        }
    }
}

/// Grid points in lexicographic order over the declared dimension order
/// (first dimension varies slowest).
pub fn grid_points(dims: &[GridDim]) -> Vec<HpPoint> {
    let mut points = vec![HpPoint::default()];
    for dim in dims {
        points = points
            .iter()
            .flat_map(|p| dim.points.iter().map(move |v| p.with(&dim.name, *v)))
            .collect();
    }
    points
}

/// Draw one HP point from a random-search distribution.
pub(crate) fn sample_point(dist: &SearchDistribution, stream: &mut SeedStream) -> HpPoint {
    match dist {
        SearchDistribution::Discrete(d) => d.support()[d.sample_index(stream)].clone(),
        SearchDistribution::Ranges { dims } => {
            let mut p = HpPoint::default();
            for dim in dims {
                p = p.with(&dim.name, dim.sample(stream.unit()));
            }
            p
        }
    }
}

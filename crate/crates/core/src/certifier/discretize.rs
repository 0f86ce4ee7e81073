use serde::{Deserialize, Serialize};

use super::CertifierError;
use crate::distribution::DiscreteDistribution;
use crate::hpo::{HpPoint, HyperHpConfig, RangeDim, Scale, SearchDistribution};

pub const DISCRETIZATION_CELLS: usize = 1000;

/// Shared cell grid onto which continuous one-dimensional ranges are mapped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub dim: String,
    pub scale: Scale,
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

impl Discretization {
    fn to_scale(&self, x: f64) -> f64 {
        match self.scale {
            Scale::Uniform => x,
            Scale::LogUniform => x.log10(),
        }
    }

    fn unscale(&self, y: f64) -> f64 {
        match self.scale {
            Scale::Uniform => y,
            Scale::LogUniform => 10f64.powf(y),
        }
    }

    /// Cell boundaries, equally spaced on the grid's scale.
    pub fn edges(&self) -> Vec<f64> {
        let (a, b) = (self.to_scale(self.lo), self.to_scale(self.hi));
        let mut e: Vec<f64> = (0..=self.cells)
            .map(|i| self.unscale(a + (b - a) * i as f64 / self.cells as f64))
            .collect();
        e[0] = self.lo;
        e[self.cells] = self.hi;
        e
    }

    /// Cell representatives: scale midpoints of each cell.
    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.to_scale(self.lo), self.to_scale(self.hi));
        (0..self.cells)
            .map(|i| self.unscale(a + (b - a) * (i as f64 + 0.5) / self.cells as f64))
            .collect()
    }
}

/// Map each one-dimensional range onto a common grid of `cells` cells spanning
/// the union of the ranges. Each cell gets the mass its range assigns to it.
pub fn discretize_ranges(
    ranges: &[RangeDim],
    cells: usize,
) -> Result<(Discretization, Vec<DiscreteDistribution>), CertifierError> {
    let first = ranges.first().ok_or(CertifierError::Empty)?;
    if cells == 0 {
        return Err(CertifierError::InvalidArgument(
            "need at least one cell".into(),
        ));
    }
    if let Some(r) = ranges.iter().find(|r| r.name != first.name) {
        return Err(CertifierError::Unsupported(format!(
            "ranges over different dimensions `{}` and `{}`",
            first.name, r.name
        )));
    }
    if let Some(r) = ranges
        .iter()
        .find(|r| !(r.lo.is_finite() && r.hi.is_finite() && r.lo < r.hi))
    {
        return Err(CertifierError::InvalidArgument(format!(
            "bad range [{}, {}]",
            r.lo, r.hi
        )));
    }
    let scale = if ranges.iter().all(|r| r.scale == Scale::LogUniform) {
        Scale::LogUniform
    } else {
        Scale::Uniform
    };
    let grid = Discretization {
        dim: first.name.clone(),
        scale,
        lo: ranges.iter().map(|r| r.lo).fold(f64::INFINITY, f64::min),
        hi: ranges
            .iter()
            .map(|r| r.hi)
            .fold(f64::NEG_INFINITY, f64::max),
        cells,
    };
    let edges = grid.edges();
    let support: Vec<HpPoint> = grid
        .points()
        .iter()
        .map(|x| HpPoint::single(&grid.dim, *x))
        .collect();
    let dists = ranges
        .iter()
        .map(|r| {
            let raw: Vec<f64> = edges
                .windows(2)
                .map(|w| (r.cdf(w[1]) - r.cdf(w[0])).max(0.0))
                .collect();
            let total: f64 = raw.iter().sum();
            let weights = raw.iter().map(|w| w / total).collect();
            DiscreteDistribution::new(support.clone(), weights)
                .map_err(|e| CertifierError::InvalidArgument(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    Ok((grid, dists))
}

/// Sampling distributions of the random-search configurations in `configs`.
/// Grid configurations are skipped. Continuous ranges must all be
/// one-dimensional over the same dimension and are discretized together.
pub fn allowable_distributions(
    configs: &[(String, HyperHpConfig)],
) -> Result<(Vec<DiscreteDistribution>, Option<Discretization>), CertifierError> {
    let mut discrete = Vec::new();
    let mut ranges = Vec::new();
    for (name, c) in configs {
        match c {
            HyperHpConfig::Grid { .. } => {}
            HyperHpConfig::RandomSearch {
                distribution: SearchDistribution::Discrete(d),
                ..
            } => discrete.push(d.clone()),
            HyperHpConfig::RandomSearch {
                distribution: SearchDistribution::Ranges { dims },
                ..
            } => match dims.as_slice() {
                [d] => ranges.push(d.clone()),
                _ => {
                    return Err(CertifierError::Unsupported(format!(
                        "config `{name}` samples {} dimensions; only one-dimensional ranges are discretized",
                        dims.len()
                    )))
                }
            },
        }
    }
    match (discrete.is_empty(), ranges.is_empty()) {
        (true, true) => Err(CertifierError::Empty),
        (false, true) => Ok((discrete, None)),
        (true, false) => {
            let (grid, dists) = discretize_ranges(&ranges, DISCRETIZATION_CELLS)?;
            Ok((dists, Some(grid)))
        }
        (false, false) => Err(CertifierError::Unsupported(
            "allowable set mixes discrete and continuous distributions".into(),
        )),
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{HpPoint, HpoError, TrialRecord};
use crate::seed::{SeedStream, STREAM_DOMAIN_MASK};

/// Admissible values of one HP dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum DimDomain {
    Interval { lo: f64, hi: f64 },
    Points { values: Vec<f64> },
}

impl DimDomain {
    fn contains(&self, x: f64) -> bool {
        match self {
            DimDomain::Interval { lo, hi } => *lo <= x && x <= *hi,
            DimDomain::Points { values } => values.contains(&x),
        }
    }

    fn validate(&self, name: &str) -> Result<(), HpoError> {
        let ok = match self {
            DimDomain::Interval { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            DimDomain::Points { values } => {
                !values.is_empty() && values.iter().all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(HpoError::InvalidTask(format!(
                "domain of `{name}` is empty or not finite"
            )))
        }
    }
}

/// Closed-form mean performance of an algorithm as a function of its HPs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeanFunction {
    Constant {
        value: f64,
    },
    /// `height * exp(-sum_d ((x_d - c_d) / w_d)^2)` over the dimensions in `center`.
    Gaussian {
        center: BTreeMap<String, f64>,
        #[serde(default)]
        widths: BTreeMap<String, f64>,
        height: f64,
        #[serde(default)]
        log10: bool,
    },
    /// `low + (high - low) / (1 + exp(-slope * (x - midpoint)))` along one dimension.
    Logistic {
        dim: String,
        midpoint: f64,
        slope: f64,
        low: f64,
        high: f64,
        #[serde(default)]
        log10: bool,
    },
    /// Explicit value per HP point; undefined elsewhere.
    Table {
        entries: Vec<TableEntry>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub point: HpPoint,
    pub value: f64,
}

fn coordinate(hp: &HpPoint, dim: &str, log10: bool) -> Result<f64, HpoError> {
    let x = hp
        .get(dim)
        .ok_or_else(|| HpoError::OutOfDomain(format!("missing dimension `{dim}` in {hp}")))?;
    if log10 {
        if x <= 0.0 {
            return Err(HpoError::OutOfDomain(format!(
                "`{dim}`={x} must be positive on a log scale"
            )));
        }
        Ok(x.log10())
    } else {
        Ok(x)
    }
}

impl MeanFunction {
    pub fn eval(&self, hp: &HpPoint) -> Result<f64, HpoError> {
        let value = match self {
            MeanFunction::Constant { value } => *value,
            MeanFunction::Gaussian {
                center,
                widths,
                height,
                log10,
            } => {
                let mut exponent = 0.0;
                for (dim, c) in center {
                    let w = widths.get(dim).copied().unwrap_or(1.0);
                    let z = (coordinate(hp, dim, *log10)? - c) / w;
                    exponent += z * z;
                }
                height * (-exponent).exp()
            }
            MeanFunction::Logistic {
                dim,
                midpoint,
                slope,
                low,
                high,
                log10,
            } => {
                let x = coordinate(hp, dim, *log10)?;
                low + (high - low) / (1.0 + (-slope * (x - midpoint)).exp())
            }
            MeanFunction::Table { entries } => entries
                .iter()
                .find(|e| &e.point == hp)
                .map(|e| e.value)
                .ok_or_else(|| HpoError::OutOfDomain(format!("no table entry for {hp}")))?,
        };
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(value)
        } else {
            Err(HpoError::InvalidTask(format!(
                "mean function evaluates to {value} at {hp}"
            )))
        }
    }

    fn validate(&self) -> Result<(), HpoError> {
        let unit = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        let ok = match self {
            MeanFunction::Constant { value } => unit(*value),
            MeanFunction::Gaussian {
                center,
                widths,
                height,
                ..
            } => {
                unit(*height)
                    && center.values().all(|c| c.is_finite())
                    && widths.values().all(|w| w.is_finite() && *w > 0.0)
            }
            MeanFunction::Logistic {
                midpoint,
                slope,
                low,
                high,
                ..
            } => unit(*low) && unit(*high) && midpoint.is_finite() && slope.is_finite(),
            MeanFunction::Table { entries } => {
                !entries.is_empty() && entries.iter().all(|e| unit(e.value))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(HpoError::InvalidTask(
                "mean function parameters out of range".to_string(),
            ))
        }
    }
}

/// Mean function plus bounded noise amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoringRule {
    pub mean: MeanFunction,
    #[serde(default)]
    pub noise: f64,
}

/// A synthetic learning task standing in for "train algorithm with HPs, report
/// validation score".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticTask {
    pub task_id: String,
    pub hp_domain: BTreeMap<String, DimDomain>,
    pub algorithms: BTreeMap<String, ScoringRule>,
}

/// Cap on the number of points checked when validating a finite domain.
const DOMAIN_CHECK_LIMIT: usize = 100_000;

impl SyntheticTask {
    pub fn validate(&self) -> Result<(), HpoError> {
        if self.hp_domain.is_empty() {
            return Err(HpoError::InvalidTask("task has no HP dimensions".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HpoError::InvalidTask("task has no algorithms".into()));
        }
        for (name, dom) in &self.hp_domain {
            dom.validate(name)?;
        }
        for (alg, rule) in &self.algorithms {
            if !(rule.noise.is_finite() && (0.0..1.0).contains(&rule.noise)) {
                return Err(HpoError::InvalidTask(format!(
                    "noise amplitude of `{alg}` must lie in [0, 1)"
                )));
            }
            rule.mean.validate()?;
        }
        if let Some(points) = self.finite_points(DOMAIN_CHECK_LIMIT) {
            for hp in &points {
                for rule in self.algorithms.values() {
                    rule.mean.eval(hp)?;
                }
            }
        }
        Ok(())
    }

    pub fn rule(&self, algorithm_id: &str) -> Result<&ScoringRule, HpoError> {
        self.algorithms
            .get(algorithm_id)
            .ok_or_else(|| HpoError::UnknownAlgorithm(algorithm_id.to_string()))
    }

    pub fn is_noiseless(&self) -> bool {
        self.algorithms.values().all(|r| r.noise == 0.0)
    }

    pub fn check_in_domain(&self, hp: &HpPoint) -> Result<(), HpoError> {
        hp.validate()?;
        if let Some(extra) = hp.dims().find(|d| !self.hp_domain.contains_key(*d)) {
            return Err(HpoError::OutOfDomain(format!(
                "dimension `{extra}` is not part of task `{}`",
                self.task_id
            )));
        }
        for (name, dom) in &self.hp_domain {
            match hp.get(name) {
                Some(x) if dom.contains(x) => {}
                Some(x) => {
                    return Err(HpoError::OutOfDomain(format!(
                        "`{name}`={x} outside its domain"
                    )))
                }
                None => return Err(HpoError::OutOfDomain(format!("missing dimension `{name}`"))),
            }
        }
        Ok(())
    }

    /// Every point of an all-finite domain, or `None` if some dimension is an
    /// interval or the product exceeds `limit`.
    pub fn finite_points(&self, limit: usize) -> Option<Vec<HpPoint>> {
        let mut points = vec![HpPoint::default()];
        for (name, dom) in &self.hp_domain {
            let DimDomain::Points { values } = dom else {
                return None;
            };
            if points.len().saturating_mul(values.len()) > limit {
                return None;
            }
            points = points
                .iter()
                .flat_map(|p| values.iter().map(move |v| p.with(name, *v)))
                .collect();
        }
        Some(points)
    }

    /// Noiseless mean metric of `algorithm_id` at `hp`.
    pub fn mean_metric(&self, algorithm_id: &str, hp: &HpPoint) -> Result<f64, HpoError> {
        self.check_in_domain(hp)?;
        self.rule(algorithm_id)?.mean.eval(hp)
    }
}

/// Evaluate one trial: `clamp(f(hp) + noise * u, 0, 1)` with `u` the next
/// symmetric unit draw of `stream`.
pub fn eval_trial(
    task: &SyntheticTask,
    algorithm_id: &str,
    hp: &HpPoint,
    stream: &mut SeedStream,
) -> Result<TrialRecord, HpoError> {
    let rule = task.rule(algorithm_id)?;
    task.check_in_domain(hp)?;
    let mean = rule.mean.eval(hp)?;
    let u = stream.symmetric_unit();
    let metric = (mean + rule.noise * u).clamp(0.0, 1.0);
    Ok(TrialRecord {
        algorithm_id: algorithm_id.to_string(),
        hp: hp.clone(),
        seed_index: stream.stream_index() & !STREAM_DOMAIN_MASK,
        metric,
        cost: 1,
    })
}

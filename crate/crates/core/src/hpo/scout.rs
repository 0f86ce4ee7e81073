//! Scouting a search range before committing to an HPO config.
//!
//! Each round evaluates a log-spaced grid over the current range. When the best
//! grid point sits on an edge, the opposite boundary moves one decade toward it
//! and the next round begins; when it is interior the range is accepted.

use serde::{Deserialize, Serialize};

use super::{eval_trial, HpPoint, HpoError, SyntheticTask};
use crate::seed::{SeedStream, EVAL_DOMAIN};

/// Ranges no wider than one decade are not narrowed further.
const MIN_RATIO: f64 = 10.0 * (1.0 + 1e-9);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoutStop {
    /// The best grid point was strictly inside the range.
    Interior,
    MaxRounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoutReport {
    pub lo: f64,
    pub hi: f64,
    pub rounds: usize,
    pub stop: ScoutStop,
    /// Best grid value and metric of the last evaluated round.
    pub best: Option<(f64, f64)>,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|j| match j {
            0 => lo,
            j if j == n - 1 => hi,
            j => 10f64.powf(a + (b - a) * j as f64 / (n - 1) as f64),
        })
        .collect()
}

/// Scout a range for dimension `dim`, holding the other coordinates at `fixed`.
#[allow(clippy::too_many_arguments)]
pub fn scout_hyper_hps(
    task: &SyntheticTask,
    algorithm_id: &str,
    dim: &str,
    fixed: &HpPoint,
    start_range: (f64, f64),
    grid_points_per_round: usize,
    max_rounds: usize,
    master_seed: u64,
) -> Result<ScoutReport, HpoError> {
    let (mut lo, mut hi) = start_range;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(HpoError::InvalidConfig(format!(
            "scout range [{lo}, {hi}] must be positive and nonempty"
        )));
    }
    let n = grid_points_per_round;
    if n < 3 {
        return Err(HpoError::InvalidConfig(
            "scouting needs at least 3 grid points per round".into(),
        ));
    }
    let mut best = None;
    for round in 0..max_rounds {
        let mut top: Option<(usize, f64, f64)> = None;
        for (j, x) in log_grid(lo, hi, n).into_iter().enumerate() {
            let hp = fixed.with(dim, x);
            let mut s = SeedStream::new(master_seed, EVAL_DOMAIN | (round * n + j) as u64);
            let metric = eval_trial(task, algorithm_id, &hp, &mut s)?.metric;
            if top.is_none_or(|(_, _, m)| metric > m) {
                top = Some((j, x, metric));
            }
        }
        let (j, x, metric) = top.expect("grid has at least 3 points");
        best = Some((x, metric));
        if j > 0 && j < n - 1 {
            return Ok(ScoutReport {
                lo,
                hi,
                rounds: round + 1,
                stop: ScoutStop::Interior,
                best,
            });
        }
        if hi / lo > MIN_RATIO {
            if j == n - 1 {
                lo *= 10.0;
            } else {
                hi *= 0.1;
            }
        }
    }
    Ok(ScoutReport {
        lo,
        hi,
        rounds: max_rounds,
        stop: ScoutStop::MaxRounds,
        best,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::hpo::{DimDomain, MeanFunction, ScoringRule};

    fn task(mean: MeanFunction) -> SyntheticTask {
        SyntheticTask {
            task_id: "scout".into(),
            hp_domain: [(
                "eps".to_string(),
                DimDomain::Interval {
                    lo: 1e-12,
                    hi: 1e12,
                },
            )]
            .into(),
            algorithms: [("a".to_string(), ScoringRule { mean, noise: 0.0 })].into(),
        }
    }

    fn increasing() -> MeanFunction {
        MeanFunction::Logistic {
            dim: "eps".into(),
            midpoint: 0.0,
            slope: 0.3,
            low: 0.1,
            high: 0.9,
            log10: true,
        }
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = log_grid(1e-12, 1e12, 5);
        assert_eq!(g[0], 1e-12);
        assert_eq!(g[4], 1e12);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_rounds_is_identity() {
        let r = scout_hyper_hps(
            &task(increasing()),
            "a",
            "eps",
            &HpPoint::default(),
            (1e-12, 1e12),
            5,
            0,
            1,
        )
        .unwrap();
        assert_eq!((r.lo, r.hi, r.rounds), (1e-12, 1e12, 0));
        assert_eq!(r.stop, ScoutStop::MaxRounds);
    }

    #[test]
    fn monotone_pins_upper_decade() {
        let r = scout_hyper_hps(
            &task(increasing()),
            "a",
            "eps",
            &HpPoint::default(),
            (1e-12, 1e12),
            5,
            40,
            1,
        )
        .unwrap();
        assert_eq!(r.stop, ScoutStop::MaxRounds);
        assert_eq!(r.hi, 1e12);
        assert!((r.lo / 1e11 - 1.0).abs() < 1e-9, "lo = {}", r.lo);
    }

    #[test]
    fn interior_peak_stops() {
        let peak = MeanFunction::Gaussian {
            center: [("eps".to_string(), 0.0)].into(),
            widths: [("eps".to_string(), 4.0)]
                .into_iter()
                .collect::<BTreeMap<_, _>>(),
            height: 0.9,
            log10: true,
        };
        let r = scout_hyper_hps(
            &task(peak),
            "a",
            "eps",
            &HpPoint::default(),
            (1e-12, 1e12),
            5,
            10,
            1,
        )
        .unwrap();
        assert_eq!(r.stop, ScoutStop::Interior);
        assert_eq!(r.rounds, 1);
        assert!(r.lo < 1.0 && 1.0 < r.hi);
        assert_eq!(r.best.unwrap().0, 1.0);
    }
}

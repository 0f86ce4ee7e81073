//! Max-divergence between allowable sampling distributions, the group count
//! that makes the defended reasoner non-deceptive, and numeric audits of the
//! argument behind it.

mod audit;
mod discretize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use audit::{proof_chain_audit, AuditCheck, AuditReport, FlaggedStep};
pub use discretize::{
    allowable_distributions, discretize_ranges, Discretization, DISCRETIZATION_CELLS,
};

use crate::distribution::DiscreteDistribution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifierError {
    #[error("allowable set violates the bounded-divergence hypothesis: distribution {from} puts mass where {to} has none")]
    InfiniteDivergence { from: usize, to: usize },
    #[error("no allowable distributions")]
    Empty,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("exp(gamma * k) overflows for gamma={gamma}, k={k}; reduce k or gamma")]
    Overflow { gamma: f64, k: usize },
    #[error("cannot certify: {0}")]
    Unsupported(String),
}

/// `max over x with mu(x) > 0 of ln(mu(x) / nu(x))`, in nats. Points missing
/// from a support have mass zero.
pub fn renyi_inf(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> f64 {
    let mut d = 0.0f64;
    for (i, (x, m)) in mu.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        let n = nu.mass_hint(x, i);
        if n <= 0.0 {
            return f64::INFINITY;
        }
        d = d.max((m / n).ln());
    }
    d
}

/// Largest divergence over all ordered pairs of allowable distributions.
pub fn pairwise_gamma(dists: &[DiscreteDistribution]) -> Result<f64, CertifierError> {
    if dists.is_empty() {
        return Err(CertifierError::Empty);
    }
    let mut gamma = 0.0f64;
    for (i, mu) in dists.iter().enumerate() {
        for (j, nu) in dists.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = renyi_inf(mu, nu);
            if d.is_infinite() {
                return Err(CertifierError::InfiniteDivergence { from: i, to: j });
            }
            gamma = gamma.max(d);
        }
    }
    Ok(gamma)
}

/// Smallest group count `R >= sqrt(t * exp(gamma * k) / k)`, at least 1.
pub fn required_r(t: f64, gamma: f64, k: usize) -> Result<u64, CertifierError> {
    if !(t > 0.0 && t.is_finite()) || !(gamma >= 0.0 && gamma.is_finite()) || k == 0 {
        return Err(CertifierError::InvalidArgument(format!(
            "need t > 0, gamma >= 0 and k >= 1 (got t={t}, gamma={gamma}, k={k})"
        )));
    }
    let v = t * (gamma * k as f64).exp() / k as f64;
    let x = v.sqrt();
    if !x.is_finite() || x >= 2f64.powi(53) {
        return Err(CertifierError::Overflow { gamma, k });
    }
    let mut r = x.ceil().max(1.0);
    // Undo an upward rounding error when v is a perfect square.
    if r > 1.0 && (r - 1.0) * (r - 1.0) >= v {
        r -= 1.0;
    }
    Ok(r as u64)
}

/// Both sides of the inequality whose violation proves non-deception.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContradictionCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// One full run (`k * r` trials) already exceeds the budget.
    pub trivial: bool,
    pub pass: bool,
}

/// `lhs = (k r / t)^(1/r)` against `rhs = 1 / (1 + exp(-gamma k))`; passes when
/// `lhs > rhs` or when `k r > t`.
pub fn contradiction_check(t: f64, gamma: f64, k: usize, r: u64) -> ContradictionCheck {
    let kr = k as f64 * r as f64;
    let lhs = (kr / t).powf(1.0 / r as f64);
    let rhs = 1.0 / (1.0 + (-gamma * k as f64).exp());
    let trivial = kr > t;
    ContradictionCheck {
        lhs,
        rhs,
        trivial,
        pass: trivial || lhs > rhs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Non-deception certificate for a (K, R)-defended random search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub gamma: f64,
    pub k: usize,
    pub t: f64,
    pub r: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub discretization: Option<Discretization>,
    pub checks: Vec<NamedCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub audit: Option<AuditReport>,
}

impl Certificate {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Compute gamma and R for `dists` and attach the contradiction check plus
/// a proof-chain audit of `audit_samples` random instances.
pub fn certify(
    dists: &[DiscreteDistribution],
    t: f64,
    k: usize,
    audit_samples: usize,
    seed: u64,
) -> Result<Certificate, CertifierError> {
    let gamma = pairwise_gamma(dists)?;
    let r = required_r(t, gamma, k)?;
    let c = contradiction_check(t, gamma, k, r);
    let bound = (t * (gamma * k as f64).exp() / k as f64).sqrt();
    let mut checks = vec![
        NamedCheck {
            name: "group count meets the bound".into(),
            pass: r as f64 >= bound,
            detail: format!("R={r} >= {bound:.6}"),
        },
        NamedCheck {
            name: "contradiction".into(),
            pass: c.pass,
            detail: if c.trivial {
                format!("K*R={} exceeds t", k as u64 * r)
            } else {
                format!("lhs={:.6} > rhs={:.6}", c.lhs, c.rhs)
            },
        },
    ];
    let audit = (audit_samples > 0).then(|| proof_chain_audit(audit_samples, seed));
    for a in audit
        .iter()
        .flat_map(|a| [&a.additivity, &a.q_bound, &a.grid])
    {
        checks.push(NamedCheck {
            name: a.name.clone(),
            pass: a.pass(),
            detail: format!("{} cases, {} failures", a.cases, a.failures.len()),
        });
    }
    Ok(Certificate {
        gamma,
        k,
        t,
        r,
        discretization: None,
        checks,
        audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpo::HpPoint;

    fn two(a: f64, b: f64) -> DiscreteDistribution {
        DiscreteDistribution::new(
            vec![HpPoint::single("x", 0.0), HpPoint::single("x", 1.0)],
            vec![a, b],
        )
        .unwrap()
    }

    #[test]
    fn divergence_examples() {
        assert_eq!(renyi_inf(&two(0.5, 0.5), &two(0.5, 0.5)), 0.0);
        let d = renyi_inf(&two(0.5, 0.5), &two(0.25, 0.75));
        assert!((d - 2f64.ln()).abs() < 1e-15);
        assert_eq!(renyi_inf(&two(1.0, 0.0), &two(0.0, 1.0)), f64::INFINITY);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(pairwise_gamma(&[two(0.3, 0.7)]), Ok(0.0));
        let g = pairwise_gamma(&[two(0.5, 0.5), two(0.25, 0.75)]).unwrap();
        assert!((g - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(
            pairwise_gamma(&[two(1.0, 0.0), two(0.5, 0.5)]),
            Err(CertifierError::InfiniteDivergence { from: 1, to: 0 })
        ));
        assert_eq!(pairwise_gamma(&[]), Err(CertifierError::Empty));
    }

    #[test]
    fn required_r_examples() {
        assert_eq!(required_r(100.0, 0.0, 1), Ok(10));
        assert_eq!(required_r(10_000.0, 0.1, 10), Ok(53));
        assert_eq!(required_r(100.0, 0.1, 10), Ok(6));
        assert_eq!(required_r(0.5, 0.0, 1), Ok(1));
        for t in 1..2000u64 {
            let want = (1..).find(|r: &u64| r * r >= t).unwrap();
            assert_eq!(required_r(t as f64, 0.0, 1), Ok(want), "t={t}");
        }
        assert!(matches!(
            required_r(100.0, 1000.0, 10),
            Err(CertifierError::Overflow { .. })
        ));
        assert!(required_r(0.0, 0.1, 1).is_err());
    }

    #[test]
    fn contradiction_examples() {
        let c = contradiction_check(10_000.0, 0.1, 10, 53);
        assert!(c.pass && !c.trivial);
        assert!((c.lhs - 0.9461).abs() < 1e-4 && (c.rhs - 0.7311).abs() < 1e-4);
        let c = contradiction_check(100.0, 0.1, 10, 6);
        assert!(c.pass && (c.lhs - 0.6f64.powf(1.0 / 6.0)).abs() < 1e-15);
        let c = contradiction_check(10_000.0, 0.0, 1, 1);
        assert!(!c.pass);
        assert_eq!(c.lhs, 1e-4);
        assert_eq!(c.rhs, 0.5);
    }
}

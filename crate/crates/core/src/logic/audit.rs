use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::Formula;

/// A set of concluded formulas, kept deduplicated (up to sugar) and sorted by
/// canonical text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Formula>", into = "Vec<Formula>")]
pub struct ConclusionSet {
    formulas: Vec<Formula>,
}

impl From<Vec<Formula>> for ConclusionSet {
    fn from(v: Vec<Formula>) -> Self {
        v.into_iter().collect()
    }
}

impl From<ConclusionSet> for Vec<Formula> {
    fn from(s: ConclusionSet) -> Self {
        s.formulas
    }
}

impl FromIterator<Formula> for ConclusionSet {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        let mut set = ConclusionSet::default();
        for f in iter {
            set.insert(f);
        }
        set
    }
}

impl ConclusionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, f: Formula) -> bool {
        if self.contains(&f) {
            return false;
        }
        let key = f.canonical();
        let at = self.formulas.partition_point(|g| g.canonical() < key);
        self.formulas.insert(at, f);
        true
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.iter().any(|g| g == f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.iter()
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn intersection(&self, other: &ConclusionSet) -> ConclusionSet {
        self.iter().filter(|f| other.contains(f)).cloned().collect()
    }

    pub fn is_subset(&self, other: &ConclusionSet) -> bool {
        self.iter().all(|f| other.contains(f))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("inconsistent conclusions: both {formula} and its negation")]
pub struct ConsistencyViolation {
    pub formula: Formula,
}

/// Reject a set holding some formula together with its negation, after
/// removing double negations.
pub fn consistency_audit(set: &ConclusionSet) -> Result<(), ConsistencyViolation> {
    let normal: Vec<Formula> = set.iter().map(Formula::normalize_negations).collect();
    for f in &normal {
        if let Formula::Not(inner) = f {
            if normal.iter().any(|g| g.same_syntax(inner)) {
                return Err(ConsistencyViolation {
                    formula: (**inner).clone(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn set(items: &[&str]) -> ConclusionSet {
        items.iter().map(|s| parse_formula(s).unwrap()).collect()
    }

    #[test]
    fn audit_examples() {
        assert_eq!(consistency_audit(&set(&["p", "q"])), Ok(()));
        assert_eq!(
            consistency_audit(&set(&["p", "!p"])).unwrap_err().formula,
            parse_formula("p").unwrap()
        );
        assert!(consistency_audit(&set(&["!!p", "!p"])).is_err());
        assert!(consistency_audit(&set(&["!p", "!!p"])).is_err());
    }

    #[test]
    fn set_semantics() {
        let s = set(&["q", "p", "!p | q", "p -> q"]);
        assert_eq!(s.len(), 3);
        let t = set(&["p", "r"]);
        assert_eq!(s.intersection(&t), set(&["p"]));
        assert!(set(&["p"]).is_subset(&s));
        let json = serde_json::to_string(&s).unwrap();
        let back: ConclusionSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}

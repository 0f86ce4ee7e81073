use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::HpoError;

/// A hyperparameter configuration: dimension name to (unitless) value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HpPoint {
    coordinates: BTreeMap<String, f64>,
}

impl HpPoint {
    pub fn new<I, S>(coords: I) -> Result<Self, HpoError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut coordinates = BTreeMap::new();
        for (name, value) in coords {
            let name = name.into();
            if !value.is_finite() {
                return Err(HpoError::NonFiniteCoordinate(name));
            }
            if coordinates.insert(name.clone(), value).is_some() {
                return Err(HpoError::DuplicateDimension(name));
            }
        }
        Ok(Self { coordinates })
    }

    /// One-dimensional point, mostly for tests and toy tasks.
    pub fn single(name: &str, value: f64) -> Self {
        Self::new([(name, value)]).expect("finite single coordinate")
    }

    pub fn get(&self, dim: &str) -> Option<f64> {
        self.coordinates.get(dim).copied()
    }

    pub fn dims(&self) -> impl Iterator<Item = &str> {
        self.coordinates.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.coordinates.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    pub(crate) fn with(&self, dim: &str, value: f64) -> Self {
        let mut coordinates = self.coordinates.clone();
        coordinates.insert(dim.to_string(), value);
        Self { coordinates }
    }

    pub(crate) fn validate(&self) -> Result<(), HpoError> {
        match self.coordinates.iter().find(|(_, v)| !v.is_finite()) {
            Some((k, _)) => Err(HpoError::NonFiniteCoordinate(k.clone())),
            None => Ok(()),
        }
    }
}

impl fmt::Display for HpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (k, v)) in self.coordinates.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_nan() {
        assert!(matches!(
            HpPoint::new([("a", 1.0), ("a", 2.0)]),
            Err(HpoError::DuplicateDimension(_))
        ));
        assert!(matches!(
            HpPoint::new([("a", f64::NAN)]),
            Err(HpoError::NonFiniteCoordinate(_))
        ));
    }

    #[test]
    fn display_is_name_ordered() {
        let p = HpPoint::new([("b", 2.0), ("a", 0.5)]).unwrap();
        assert_eq!(p.to_string(), "(a=0.5, b=2)");
    }
}

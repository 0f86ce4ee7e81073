use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Nonnegative rational time budget of a possibility operator.
pub type Budget = Ratio<u64>;

/// Formula of the multimodal logic.
///
/// `Or` and `Implies` are sugar: `a | b` is `!(!a & !b)` and `a -> b` is
/// `!a | b`. Equality compares the desugared forms, so sugared and unsugared
/// spellings of one formula are equal. Use [`Formula::same_syntax`] for an
/// exact comparison.
#[derive(Debug, Clone)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Possibly { budget: Budget, inner: Box<Formula> },
    Believes { tag: String, inner: Box<Formula> },
}

pub fn atom(name: &str) -> Formula {
    Formula::Atom(name.to_string())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn possibly(budget: Budget, f: Formula) -> Formula {
    Formula::Possibly {
        budget,
        inner: Box::new(f),
    }
}

pub fn believes(tag: &str, f: Formula) -> Formula {
    Formula::Believes {
        tag: tag.to_string(),
        inner: Box::new(f),
    }
}

/// `!<>[t] !f`
pub fn necessarily(budget: Budget, f: Formula) -> Formula {
    not(possibly(budget, not(f)))
}

impl Formula {
    /// Rewrite `Or` and `Implies` into `Not`/`And` everywhere.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Not(a) => not(a.desugar()),
            Formula::And(a, b) => and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => not(and(not(a.desugar()), not(b.desugar()))),
            Formula::Implies(a, b) => not(and(not(not(a.desugar())), not(b.desugar()))),
            Formula::Possibly { budget, inner } => possibly(*budget, inner.desugar()),
            Formula::Believes { tag, inner } => believes(tag, inner.desugar()),
        }
    }

    /// Exact syntactic equality, without unfolding sugar.
    pub fn same_syntax(&self, other: &Formula) -> bool {
        use Formula::*;
        match (self, other) {
            (Atom(a), Atom(b)) => a == b,
            (Not(a), Not(b)) => a.same_syntax(b),
            (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Implies(a, b), Implies(c, d)) => {
                a.same_syntax(c) && b.same_syntax(d)
            }
            (
                Possibly {
                    budget: s,
                    inner: a,
                },
                Possibly {
                    budget: t,
                    inner: b,
                },
            ) => s == t && a.same_syntax(b),
            (Believes { tag: s, inner: a }, Believes { tag: t, inner: b }) => {
                s == t && a.same_syntax(b)
            }
            _ => false,
        }
    }

    /// Desugar and remove every double negation.
    pub fn normalize_negations(&self) -> Formula {
        fn go(f: &Formula) -> Formula {
            match f {
                Formula::Not(a) => match a.as_ref() {
                    Formula::Not(b) => go(b),
                    _ => not(go(a)),
                },
                Formula::And(a, b) => and(go(a), go(b)),
                Formula::Possibly { budget, inner } => possibly(*budget, go(inner)),
                Formula::Believes { tag, inner } => believes(tag, go(inner)),
                _ => f.clone(),
            }
        }
        go(&self.desugar())
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(a)
            | Formula::Possibly { inner: a, .. }
            | Formula::Believes { inner: a, .. } => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Canonical text of the desugared form, usable as a sort key.
    pub fn canonical(&self) -> String {
        self.desugar().to_string()
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::Atom(name) => write!(f, "{name}"),
            Formula::Not(a) => {
                write!(f, "!")?;
                a.fmt_at(f, 4)
            }
            Formula::And(a, b) => {
                a.fmt_at(f, 3)?;
                write!(f, " & ")?;
                b.fmt_at(f, 4)
            }
            Formula::Or(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " | ")?;
                b.fmt_at(f, 3)
            }
            Formula::Implies(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_at(f, 1)
            }
            Formula::Possibly { budget, inner } => {
                write!(f, "<>[{}] ", format_budget(budget))?;
                inner.fmt_at(f, 4)
            }
            Formula::Believes { tag, inner } => {
                write!(f, "B{{{tag}}} ")?;
                inner.fmt_at(f, 4)
            }
        }
    }
}

pub fn format_budget(b: &Budget) -> String {
    if *b.denom() == 1 {
        b.numer().to_string()
    } else {
        format!("{}/{}", b.numer(), b.denom())
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.same_syntax(other) || self.desugar().same_syntax(&other.desugar())
    }
}

impl Eq for Formula {}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

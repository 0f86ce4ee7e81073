//! Derivations and their text fixture format.
//!
//! ```text
//! # comment
//! define * = n @ 100
//! hypothesis <>[100] B{*} p
//! goal <>[100] B{n} p
//! 1 ; <>[100] B{*} p ; Hypothesis ; ; note
//! 2 ; <>[100] (B{n} p & !<>[100] B{n} !p) ; DefSubstitution ; 1
//! 3 ; <>[100] B{n} p ; ConjElimLeft ; 2
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::{format_budget, Formula};
use super::parse_formula;
use super::rules::{check_step, Definition, Definitions, RuleId, StepError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub index: usize,
    pub conclusion: Formula,
    pub rule: RuleId,
    pub premises: Vec<usize>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Derivation {
    pub definitions: Definitions,
    pub hypotheses: Vec<Formula>,
    pub steps: Vec<DerivationStep>,
    pub goal: Option<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("derivation has no steps")]
    Empty,
    #[error("step {step}: expected index {expected}")]
    BadIndex { step: usize, expected: usize },
    #[error("step {step}: {error}")]
    Step { step: usize, error: StepError },
    #[error("goal {goal} is not the conclusion of the last step")]
    GoalMismatch { goal: String },
    #[error("a contradiction goal must be closed by ContradictionIntro")]
    ContradictionNotClosed,
}

impl DerivationError {
    /// Index of the step the error is attributed to, if any.
    pub fn step(&self) -> Option<usize> {
        match self {
            DerivationError::BadIndex { step, .. } | DerivationError::Step { step, .. } => {
                Some(*step)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FixtureError {
    pub line: usize,
    pub message: String,
}

/// `x & !x` or `!x & x`.
fn is_contradiction(f: &Formula) -> bool {
    match f.desugar() {
        Formula::And(a, b) => match (a.as_ref(), b.as_ref()) {
            (Formula::Not(x), y) | (y, Formula::Not(x)) => x.same_syntax(y),
            _ => false,
        },
        _ => false,
    }
}

impl Derivation {
    /// The formula the derivation establishes: the declared goal, or else the
    /// last step's conclusion.
    pub fn conclusion(&self) -> Option<&Formula> {
        self.goal
            .as_ref()
            .or_else(|| self.steps.last().map(|s| &s.conclusion))
    }

    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let mut d = Derivation::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| FixtureError { line, message };
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let formula = |s: &str| parse_formula(s.trim()).map_err(|e| err(e.to_string()));
            if let Some(rest) = content.strip_prefix("define ") {
                let (tag, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `define TAG = BASE @ BUDGET`".into()))?;
                let (base, budget) = rhs
                    .split_once('@')
                    .ok_or_else(|| err("expected `define TAG = BASE @ BUDGET`".into()))?;
                let budget = match formula(&format!("<>[{}] x", budget.trim()))? {
                    Formula::Possibly { budget, .. } => budget,
                    _ => unreachable!("parsed a possibility"),
                };
                d.definitions.insert(
                    tag.trim().to_string(),
                    Definition {
                        base: base.trim().to_string(),
                        budget,
                    },
                );
            } else if let Some(rest) = content.strip_prefix("hypothesis ") {
                d.hypotheses.push(formula(rest)?);
            } else if let Some(rest) = content.strip_prefix("goal ") {
                d.goal = Some(formula(rest)?);
            } else {
                let fields: Vec<&str> = content.splitn(5, ';').map(str::trim).collect();
                if fields.len() < 3 {
                    return Err(err(
                        "expected `index ; formula ; rule ; premises ; note`".into()
                    ));
                }
                let index = fields[0]
                    .parse()
                    .map_err(|_| err(format!("bad step index `{}`", fields[0])))?;
                let conclusion = formula(fields[1])?;
                let rule = fields[2]
                    .parse::<RuleId>()
                    .map_err(|e| err(e.to_string()))?;
                let premises = fields
                    .get(3)
                    .unwrap_or(&"")
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|_| err(format!("bad premise `{s}`"))))
                    .collect::<Result<Vec<usize>, _>>()?;
                d.steps.push(DerivationStep {
                    index,
                    conclusion,
                    rule,
                    premises,
                    note: fields.get(4).unwrap_or(&"").to_string(),
                });
            }
        }
        Ok(d)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (tag, def) in &self.definitions {
            writeln!(
                f,
                "define {tag} = {} @ {}",
                def.base,
                format_budget(&def.budget)
            )?;
        }
        for h in &self.hypotheses {
            writeln!(f, "hypothesis {h}")?;
        }
        if let Some(g) = &self.goal {
            writeln!(f, "goal {g}")?;
        }
        for s in &self.steps {
            let premises: Vec<String> = s.premises.iter().map(|p| p.to_string()).collect();
            let line = format!(
                "{} ; {} ; {} ; {} ; {}",
                s.index,
                s.conclusion,
                s.rule,
                premises.join(", "),
                s.note
            );
            writeln!(f, "{}", line.trim_end())?;
        }
        Ok(())
    }
}

/// Check every step, then the goal.
pub fn check_derivation(d: &Derivation) -> Result<(), DerivationError> {
    let last = d.steps.last().ok_or(DerivationError::Empty)?;
    for (i, step) in d.steps.iter().enumerate() {
        if step.index != i + 1 {
            return Err(DerivationError::BadIndex {
                step: step.index,
                expected: i + 1,
            });
        }
        check_step(step, &d.steps[..i], &d.hypotheses, &d.definitions).map_err(|error| {
            DerivationError::Step {
                step: step.index,
                error,
            }
        })?;
    }
    if let Some(goal) = &d.goal {
        if goal != &last.conclusion {
            return Err(DerivationError::GoalMismatch {
                goal: goal.to_string(),
            });
        }
        if is_contradiction(goal) && last.rule != RuleId::ContradictionIntro {
            return Err(DerivationError::ContradictionNotClosed);
        }
    }
    Ok(())
}

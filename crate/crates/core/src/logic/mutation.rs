//! Single-step mutations of a derivation, for checking that the checker is
//! not vacuous.

use std::fmt;

use super::formula::{self, Budget, Formula};
use super::{Derivation, RuleId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MutationKind {
    /// Replace the rule with another one.
    RuleSwap { to: RuleId },
    /// Reverse the premise list.
    PremiseReorder,
    /// Point one premise at a different earlier step.
    PremiseRedirect { slot: usize, to: usize },
    /// Change the claimed conclusion.
    Perturb { how: &'static str },
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationKind::RuleSwap { to } => write!(f, "rule -> {to}"),
            MutationKind::PremiseReorder => write!(f, "premises reversed"),
            MutationKind::PremiseRedirect { slot, to } => write!(f, "premise #{slot} -> step {to}"),
            MutationKind::Perturb { how } => write!(f, "conclusion {how}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mutant {
    pub step: usize,
    pub kind: MutationKind,
    pub derivation: Derivation,
}

fn rename_first_atom(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Atom(name) => Some(formula::atom(&format!("{name}_mutated"))),
        Formula::Not(a) => rename_first_atom(a).map(formula::not),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let rebuild = |x: Formula, y: Formula| match f {
                Formula::And(..) => formula::and(x, y),
                Formula::Or(..) => formula::or(x, y),
                _ => formula::implies(x, y),
            };
            match rename_first_atom(a) {
                Some(x) => Some(rebuild(x, (**b).clone())),
                None => rename_first_atom(b).map(|y| rebuild((**a).clone(), y)),
            }
        }
        Formula::Possibly { budget, inner } => {
            rename_first_atom(inner).map(|x| formula::possibly(*budget, x))
        }
        Formula::Believes { tag, inner } => {
            rename_first_atom(inner).map(|x| formula::believes(tag, x))
        }
    }
}

fn bump_first_budget(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Atom(_) => None,
        Formula::Not(a) => bump_first_budget(a).map(formula::not),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let rebuild = |x: Formula, y: Formula| match f {
                Formula::And(..) => formula::and(x, y),
                Formula::Or(..) => formula::or(x, y),
                _ => formula::implies(x, y),
            };
            match bump_first_budget(a) {
                Some(x) => Some(rebuild(x, (**b).clone())),
                None => bump_first_budget(b).map(|y| rebuild((**a).clone(), y)),
            }
        }
        Formula::Possibly { budget, inner } => Some(formula::possibly(
            budget + Budget::from_integer(1),
            (**inner).clone(),
        )),
        Formula::Believes { tag, inner } => {
            bump_first_budget(inner).map(|x| formula::believes(tag, x))
        }
    }
}

/// Every rule swap, premise reorder/redirect and conclusion perturbation of
/// every step.
pub fn single_step_mutants(d: &Derivation) -> Vec<Mutant> {
    let mut out = Vec::new();
    for (i, step) in d.steps.iter().enumerate() {
        let mut push = |kind: MutationKind, edit: &dyn Fn(&mut Derivation)| {
            let mut m = d.clone();
            edit(&mut m);
            out.push(Mutant {
                step: step.index,
                kind,
                derivation: m,
            });
        };
        for to in RuleId::ALL.into_iter().filter(|r| *r != step.rule) {
            push(MutationKind::RuleSwap { to }, &|m| m.steps[i].rule = to);
        }
        if step.premises.len() >= 2 {
            let mut rev = step.premises.clone();
            rev.reverse();
            if rev != step.premises {
                push(MutationKind::PremiseReorder, &|m| {
                    m.steps[i].premises = rev.clone()
                });
            }
        }
        for (slot, &current) in step.premises.iter().enumerate() {
            for to in (1..step.index).filter(|&j| j != current) {
                push(MutationKind::PremiseRedirect { slot, to }, &|m| {
                    m.steps[i].premises[slot] = to
                });
            }
        }
        let c = &step.conclusion;
        let mut perturbed = vec![("negated", formula::not(c.clone()))];
        if let Some(f) = rename_first_atom(c) {
            perturbed.push(("atom renamed", f));
        }
        if let Some(f) = bump_first_budget(c) {
            perturbed.push(("budget bumped", f));
        }
        for (how, f) in perturbed {
            push(MutationKind::Perturb { how }, &|m| {
                m.steps[i].conclusion = f.clone()
            });
        }
    }
    out
}

//! Inference rules and single-step checking.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::CheckedAdd;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::{self, Budget, Formula};
use super::DerivationStep;

/// Rule names accepted in derivations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    DefSubstitution,
    ConjElimLeft,
    ConjElimRight,
    DiamondCollapse,
    DiamondDistAnd,
    Necessitation,
    Distribution,
    Reflexivity,
    Transitivity,
    Symmetry,
    Consistency,
    ModusPonens,
    ModusTollens,
    ContradictionIntro,
    Hypothesis,
    Tautology,
    DoubleNegation,
}

impl RuleId {
    pub const ALL: [RuleId; 17] = [
        RuleId::DefSubstitution,
        RuleId::ConjElimLeft,
        RuleId::ConjElimRight,
        RuleId::DiamondCollapse,
        RuleId::DiamondDistAnd,
        RuleId::Necessitation,
        RuleId::Distribution,
        RuleId::Reflexivity,
        RuleId::Transitivity,
        RuleId::Symmetry,
        RuleId::Consistency,
        RuleId::ModusPonens,
        RuleId::ModusTollens,
        RuleId::ContradictionIntro,
        RuleId::Hypothesis,
        RuleId::Tautology,
        RuleId::DoubleNegation,
    ];

    /// Number of premises the rule consumes.
    pub fn arity(self) -> usize {
        use RuleId::*;
        match self {
            Distribution | Reflexivity | Transitivity | Symmetry | Consistency | Hypothesis
            | Tautology => 0,
            DefSubstitution | ConjElimLeft | ConjElimRight | DiamondCollapse | DiamondDistAnd
            | Necessitation | DoubleNegation => 1,
            ModusPonens | ModusTollens | ContradictionIntro => 2,
        }
    }

    pub fn name(self) -> &'static str {
        use RuleId::*;
        match self {
            DefSubstitution => "DefSubstitution",
            ConjElimLeft => "ConjElimLeft",
            ConjElimRight => "ConjElimRight",
            DiamondCollapse => "DiamondCollapse",
            DiamondDistAnd => "DiamondDistAnd",
            Necessitation => "Necessitation",
            Distribution => "Distribution",
            Reflexivity => "Reflexivity",
            Transitivity => "Transitivity",
            Symmetry => "Symmetry",
            Consistency => "Consistency",
            ModusPonens => "ModusPonens",
            ModusTollens => "ModusTollens",
            ContradictionIntro => "ContradictionIntro",
            Hypothesis => "Hypothesis",
            Tautology => "Tautology",
            DoubleNegation => "DoubleNegation",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = StepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| StepError::UnknownRule(s.to_string()))
    }
}

/// `B{tag} f` abbreviates `B{base} f & !<>[budget] B{base} f'` where `f'` is the
/// complement of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub base: String,
    pub budget: Budget,
}

pub type Definitions = BTreeMap<String, Definition>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("{rule} takes {expected} premise(s), got {found}")]
    ArityMismatch {
        rule: RuleId,
        expected: usize,
        found: usize,
    },
    #[error("premise {premise} does not refer to an earlier step")]
    BadPremise { premise: usize },
    #[error("conclusion does not match {rule}: expected {expected}")]
    SchemaMismatch { rule: RuleId, expected: String },
    #[error("{rule} needs a theorem, but its premise depends on hypotheses")]
    NotATheorem { rule: RuleId },
}

fn as_not(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Not(a) => Some(a),
        _ => None,
    }
}

fn as_and(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::And(a, b) => Some((a, b)),
        _ => None,
    }
}

fn as_possibly(f: &Formula) -> Option<(Budget, &Formula)> {
    match f {
        Formula::Possibly { budget, inner } => Some((*budget, inner)),
        _ => None,
    }
}

fn as_believes(f: &Formula) -> Option<(&str, &Formula)> {
    match f {
        Formula::Believes { tag, inner } => Some((tag, inner)),
        _ => None,
    }
}

/// `a -> b` in desugared form: `!(!!a & !b)`.
fn as_implies(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (l, r) = as_and(as_not(f)?)?;
    Some((as_not(as_not(l)?)?, as_not(r)?))
}

/// `[]_t a` in desugared form: `!<>[t] !a`.
fn as_box(f: &Formula) -> Option<(Budget, &Formula)> {
    let (t, inner) = as_possibly(as_not(f)?)?;
    Some((t, as_not(inner)?))
}

fn complement(f: &Formula) -> Formula {
    match f {
        Formula::Not(a) => (**a).clone(),
        _ => formula::not(f.clone()),
    }
}

fn unfold(def: &Definition, inner: &Formula) -> Formula {
    formula::and(
        formula::believes(&def.base, inner.clone()),
        formula::not(formula::possibly(
            def.budget,
            formula::believes(&def.base, complement(inner)),
        )),
    )
}

fn unfold_all(f: &Formula, defs: &Definitions) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => formula::not(unfold_all(a, defs)),
        Formula::And(a, b) => formula::and(unfold_all(a, defs), unfold_all(b, defs)),
        Formula::Or(a, b) => formula::or(unfold_all(a, defs), unfold_all(b, defs)),
        Formula::Implies(a, b) => formula::implies(unfold_all(a, defs), unfold_all(b, defs)),
        Formula::Possibly { budget, inner } => formula::possibly(*budget, unfold_all(inner, defs)),
        Formula::Believes { tag, inner } => {
            let inner = unfold_all(inner, defs);
            match defs.get(tag) {
                Some(def) => unfold(def, &inner),
                None => formula::believes(tag, inner),
            }
        }
    }
}

/// Does `c` arise from `p` by unfolding defined belief operators? Returns the
/// number of unfoldings on success.
fn unfolds_to(p: &Formula, c: &Formula, defs: &Definitions) -> Option<usize> {
    if p.same_syntax(c) {
        return Some(0);
    }
    if let Formula::Believes { tag, inner } = p {
        if let Some(def) = defs.get(tag) {
            if let Some((l, r)) = as_and(c) {
                if let (Some((base, phi)), Some((t, rhs))) =
                    (as_believes(l), as_not(r).and_then(as_possibly))
                {
                    if let Some((base2, psi)) = as_believes(rhs) {
                        if base == def.base
                            && base2 == def.base
                            && t == def.budget
                            && psi.same_syntax(&complement(phi))
                        {
                            if let Some(n) = unfolds_to(inner, phi, defs) {
                                return Some(n + 1);
                            }
                        }
                    }
                }
            }
        }
    }
    match (p, c) {
        (Formula::Not(a), Formula::Not(b)) => unfolds_to(a, b, defs),
        (Formula::And(a, b), Formula::And(x, y)) => {
            Some(unfolds_to(a, x, defs)? + unfolds_to(b, y, defs)?)
        }
        (
            Formula::Possibly {
                budget: s,
                inner: a,
            },
            Formula::Possibly {
                budget: t,
                inner: b,
            },
        ) if s == t => unfolds_to(a, b, defs),
        (Formula::Believes { tag: g, inner: a }, Formula::Believes { tag: h, inner: b })
            if g == h =>
        {
            unfolds_to(a, b, defs)
        }
        _ => None,
    }
}

fn conj_elim(p: &Formula, c: &Formula, left: bool) -> Result<(), Option<Formula>> {
    let pick = |a: &Formula, b: &Formula| if left { a.clone() } else { b.clone() };
    let (mut x, mut y) = (p, c);
    loop {
        if let Some((a, b)) = as_and(x) {
            if pick(a, b).same_syntax(y) {
                return Ok(());
            }
        }
        match (x, y) {
            (
                Formula::Possibly {
                    budget: s,
                    inner: a,
                },
                Formula::Possibly {
                    budget: t,
                    inner: b,
                },
            ) if s == t => (x, y) = (a, b),
            (Formula::Believes { tag: g, inner: a }, Formula::Believes { tag: h, inner: b })
                if g == h =>
            {
                (x, y) = (a, b)
            }
            _ => break,
        }
    }
    // Rebuild the expected conclusion for the error report.
    fn rebuild(f: &Formula, left: bool) -> Option<Formula> {
        match f {
            Formula::And(a, b) => Some(if left { (**a).clone() } else { (**b).clone() }),
            Formula::Possibly { budget, inner } => {
                Some(formula::possibly(*budget, rebuild(inner, left)?))
            }
            Formula::Believes { tag, inner } => Some(formula::believes(tag, rebuild(inner, left)?)),
            _ => None,
        }
    }
    Err(rebuild(p, left))
}

/// Truth-table check treating maximal atomic and modal subformulas as variables.
pub fn is_tautology(f: &Formula) -> bool {
    fn vars(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::Not(a) => vars(a, out),
            Formula::And(a, b) => {
                vars(a, out);
                vars(b, out)
            }
            _ => {
                if !out.iter().any(|v| v.same_syntax(f)) {
                    out.push(f.clone())
                }
            }
        }
    }
    fn eval(f: &Formula, vs: &[Formula], assignment: u64) -> bool {
        match f {
            Formula::Not(a) => !eval(a, vs, assignment),
            Formula::And(a, b) => eval(a, vs, assignment) && eval(b, vs, assignment),
            _ => {
                let i = vs.iter().position(|v| v.same_syntax(f)).expect("collected");
                assignment >> i & 1 == 1
            }
        }
    }
    const MAX_VARS: usize = 20;
    let f = f.desugar();
    let mut vs = Vec::new();
    vars(&f, &mut vs);
    vs.len() <= MAX_VARS && (0..1u64 << vs.len()).all(|a| eval(&f, &vs, a))
}

/// Does step `index` (1-based) rest on a hypothesis?
fn depends_on_hypotheses(earlier: &[DerivationStep], index: usize) -> bool {
    let step = &earlier[index - 1];
    step.rule == RuleId::Hypothesis
        || step
            .premises
            .iter()
            .any(|&i| i >= 1 && i < index && depends_on_hypotheses(earlier, i))
}

fn mismatch(rule: RuleId, expected: impl fmt::Display) -> StepError {
    StepError::SchemaMismatch {
        rule,
        expected: expected.to_string(),
    }
}

/// Check one step against the conclusions of the steps before it.
///
/// `earlier` holds the steps with indices `1..step.index`.
pub fn check_step(
    step: &DerivationStep,
    earlier: &[DerivationStep],
    hypotheses: &[Formula],
    definitions: &Definitions,
) -> Result<(), StepError> {
    let rule = step.rule;
    if step.premises.len() != rule.arity() {
        return Err(StepError::ArityMismatch {
            rule,
            expected: rule.arity(),
            found: step.premises.len(),
        });
    }
    let mut ps = Vec::with_capacity(step.premises.len());
    for &i in &step.premises {
        if i == 0 || i >= step.index || i > earlier.len() {
            return Err(StepError::BadPremise { premise: i });
        }
        ps.push(earlier[i - 1].conclusion.desugar());
    }
    let c = step.conclusion.desugar();
    let expect = |expected: Formula| {
        if expected.desugar().same_syntax(&c) {
            Ok(())
        } else {
            Err(mismatch(rule, expected))
        }
    };
    use RuleId::*;
    match rule {
        Hypothesis => {
            if hypotheses.iter().any(|h| h == &step.conclusion) {
                Ok(())
            } else {
                Err(mismatch(rule, "one of the hypotheses"))
            }
        }
        Tautology => {
            if is_tautology(&c) {
                Ok(())
            } else {
                Err(mismatch(rule, "a propositional tautology"))
            }
        }
        DoubleNegation => {
            if ps[0]
                .normalize_negations()
                .same_syntax(&c.normalize_negations())
            {
                Ok(())
            } else {
                Err(mismatch(rule, ps[0].normalize_negations()))
            }
        }
        DefSubstitution => match unfolds_to(&ps[0], &c, definitions) {
            Some(n) if n > 0 => Ok(()),
            _ => Err(mismatch(rule, unfold_all(&ps[0], definitions))),
        },
        ConjElimLeft | ConjElimRight => {
            conj_elim(&ps[0], &c, rule == ConjElimLeft).map_err(|expected| match expected {
                Some(f) => mismatch(rule, f),
                None => mismatch(rule, "a conjunction, possibly under <> or B prefixes"),
            })
        }
        DiamondCollapse => {
            let (t, inner) = as_possibly(&ps[0]).ok_or_else(|| {
                mismatch(rule, "premise of the form <>[t] <>[t] a or <>[t] !<>[t] a")
            })?;
            if let Some((s, a)) = as_possibly(inner) {
                if s == t {
                    return expect(formula::possibly(t, a.clone()));
                }
            }
            if let Some((s, a)) = as_not(inner).and_then(as_possibly) {
                if s == t {
                    return expect(formula::not(formula::possibly(t, a.clone())));
                }
            }
            Err(mismatch(
                rule,
                "premise of the form <>[t] <>[t] a or <>[t] !<>[t] a",
            ))
        }
        DiamondDistAnd => match as_possibly(&ps[0]).and_then(|(t, x)| Some((t, as_and(x)?))) {
            Some((t, (a, b))) => expect(formula::and(
                formula::possibly(t, a.clone()),
                formula::possibly(t, b.clone()),
            )),
            None => Err(mismatch(rule, "premise of the form <>[t] (a & b)")),
        },
        Necessitation => {
            if depends_on_hypotheses(earlier, step.premises[0]) {
                return Err(StepError::NotATheorem { rule });
            }
            let phi = &ps[0];
            let boxed = as_box(&c).is_some_and(|(_, x)| x.same_syntax(phi));
            let believed = as_believes(&c).is_some_and(|(_, x)| x.same_syntax(phi));
            if boxed || believed {
                Ok(())
            } else {
                Err(mismatch(rule, format!("!<>[t] !({phi}) or B{{g}} ({phi})")))
            }
        }
        Distribution => {
            const PATTERN: &str =
                "[]_t(a -> b) -> ([]_t a -> []_t b) or B{g}(a -> b) -> (B{g} a -> B{g} b)";
            let (x, _) = as_implies(&c).ok_or_else(|| mismatch(rule, PATTERN))?;
            if let Some((t, (a, b))) = as_box(x).and_then(|(t, i)| Some((t, as_implies(i)?))) {
                return expect(formula::implies(
                    x.clone(),
                    formula::implies(
                        formula::necessarily(t, a.clone()),
                        formula::necessarily(t, b.clone()),
                    ),
                ))
                .map_err(|_| mismatch(rule, PATTERN));
            }
            if let Some((g, (a, b))) = as_believes(x).and_then(|(g, i)| Some((g, as_implies(i)?))) {
                return expect(formula::implies(
                    x.clone(),
                    formula::implies(
                        formula::believes(g, a.clone()),
                        formula::believes(g, b.clone()),
                    ),
                ))
                .map_err(|_| mismatch(rule, PATTERN));
            }
            Err(mismatch(rule, PATTERN))
        }
        Reflexivity => {
            const PATTERN: &str = "a -> <>[t] a";
            let (a, y) = as_implies(&c).ok_or_else(|| mismatch(rule, PATTERN))?;
            match as_possibly(y) {
                Some((_, b)) if b.same_syntax(a) => Ok(()),
                _ => Err(mismatch(rule, PATTERN)),
            }
        }
        Transitivity => {
            const PATTERN: &str = "<>[t] <>[s] a -> <>[t+s] a";
            let (x, _) = as_implies(&c).ok_or_else(|| mismatch(rule, PATTERN))?;
            let (t, inner) = as_possibly(x).ok_or_else(|| mismatch(rule, PATTERN))?;
            let (s, a) = as_possibly(inner).ok_or_else(|| mismatch(rule, PATTERN))?;
            let sum = t
                .checked_add(&s)
                .ok_or_else(|| mismatch(rule, "a budget sum that fits in 64 bits"))?;
            expect(formula::implies(
                x.clone(),
                formula::possibly(sum, a.clone()),
            ))
        }
        Symmetry => {
            const PATTERN: &str = "<>[s] []_t a -> []_t a";
            let (x, y) = as_implies(&c).ok_or_else(|| mismatch(rule, PATTERN))?;
            match as_possibly(x) {
                Some((_, z)) if as_box(z).is_some() && z.same_syntax(y) => Ok(()),
                _ => Err(mismatch(rule, PATTERN)),
            }
        }
        Consistency => {
            const PATTERN: &str = "!(B{g} a & B{g} !a)";
            let (l, r) = as_not(&c)
                .and_then(as_and)
                .ok_or_else(|| mismatch(rule, PATTERN))?;
            match (as_believes(l), as_believes(r)) {
                (Some((g, a)), Some((h, b)))
                    if g == h && as_not(b).is_some_and(|b| b.same_syntax(a)) =>
                {
                    Ok(())
                }
                _ => Err(mismatch(rule, PATTERN)),
            }
        }
        ModusPonens => {
            let (a, b) = as_implies(&ps[1])
                .ok_or_else(|| mismatch(rule, "second premise of the form a -> b"))?;
            if !a.same_syntax(&ps[0]) {
                return Err(mismatch(
                    rule,
                    "first premise equal to the antecedent of the second",
                ));
            }
            expect(b.clone())
        }
        ModusTollens => {
            let (a, b) = as_implies(&ps[0])
                .ok_or_else(|| mismatch(rule, "first premise of the form a -> b"))?;
            if !as_not(&ps[1]).is_some_and(|n| n.same_syntax(b)) {
                return Err(mismatch(
                    rule,
                    "second premise negating the consequent of the first",
                ));
            }
            expect(formula::not(a.clone()))
        }
        ContradictionIntro => {
            let (x, y) = (&ps[0], &ps[1]);
            let opposed = as_not(y).is_some_and(|n| n.same_syntax(x))
                || as_not(x).is_some_and(|n| n.same_syntax(y));
            if !opposed {
                return Err(mismatch(rule, "premises of the form a and !a"));
            }
            expect(formula::and(x.clone(), y.clone()))
        }
    }
}

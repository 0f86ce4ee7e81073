//! The multimodal logic: formulas, a parser and printer, rule-checked
//! derivations and a consistency audit for conclusion sets.

mod audit;
mod derivation;
mod formula;
pub mod mutation;
mod parser;
mod rules;

pub use audit::{consistency_audit, ConclusionSet, ConsistencyViolation};
pub use derivation::{check_derivation, Derivation, DerivationError, DerivationStep, FixtureError};
pub use formula::{
    and, atom, believes, format_budget, implies, necessarily, not, or, possibly, Budget, Formula,
};
pub use parser::{parse_formula, ParseError};
pub use rules::{check_step, is_tautology, Definition, Definitions, RuleId, StepError};

/// Bundled derivation fixtures, by name.
pub const FIXTURES: [(&str, &str); 4] = [
    (
        "defended-reasoner",
        include_str!("../../fixtures/defended_reasoner.proof"),
    ),
    (
        "diamond-over-or",
        include_str!("../../fixtures/diamond_over_or.proof"),
    ),
    (
        "box-over-and",
        include_str!("../../fixtures/box_over_and.proof"),
    ),
    (
        "box-reflexive",
        include_str!("../../fixtures/box_reflexive.proof"),
    ),
];

/// Look up a bundled fixture.
pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

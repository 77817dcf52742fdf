//! Crate-wide error type.

use thiserror::Error;

use crate::logic::ParseError;
use crate::structures::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("`eq` must have arity 2, got {arity}")]
    BadEqArity { arity: usize },

    #[error("`{name}` is not a valid predicate name")]
    BadPredicateName { name: String },

    #[error("duplicate predicate `{name}`")]
    DuplicatePredicate { name: String },

    #[error("unknown predicate `{name}`")]
    UnknownPredicate { name: String },

    #[error("predicate `{name}` has arity {expected}, got {got} argument(s)")]
    ArityMismatch { name: String, expected: usize, got: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("structures are over different vocabularies")]
    VocabularyMismatch,

    #[error("duplicate node id `{id}`")]
    DuplicateNode { id: String },

    #[error("unknown node `{id}`")]
    UnknownNode { id: String },

    #[error("assignment does not bind variable `{var}`")]
    IncompleteAssignment { var: String },

    #[error("set variable `${var}` is not bound")]
    UnboundSetVariable { var: String },

    #[error("set constructs require the NP evaluator")]
    SetConstructOutsideNp,

    #[error("formula must be closed, but has free variables: {vars:?}")]
    NotClosed { vars: Vec<String> },

    #[error("universe of {size} nodes exceeds the supported maximum of {max}")]
    UniverseTooLarge { size: usize, max: usize },

    #[error("budget exceeded: {examined} candidates examined (budget {budget})")]
    BudgetExceeded { examined: u64, budget: u64 },

    #[error("table for `{pred}` with {entries} entries is too large to enumerate")]
    TableTooLarge { pred: String, entries: usize },

    #[error("structure is not bounded: nodes `{u1}` and `{u2}` share all definite unary values")]
    NotBounded { u1: String, u2: String },

    #[error("structure violates the canonical-abstraction image conditions: {}", list_violations(.0))]
    IcaViolations(Vec<Violation>),

    #[error("no node formula supplied for node `{node}`")]
    MissingNodeFormula { node: String },

    #[error("structure file error at line {line}: {msg}")]
    StructureFile { line: usize, msg: String },

    #[error("structure file is invalid: {}", list_violations(.0))]
    InvalidStructure(Vec<Violation>),

    #[error("concretization is empty up to {max_nodes} nodes; both implications hold vacuously")]
    EmptyConcretization { max_nodes: usize },

    #[error("unknown fixture `{name}`")]
    UnknownFixture { name: String },
}

fn list_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

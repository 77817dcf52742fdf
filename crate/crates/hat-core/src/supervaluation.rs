//! The most-precise query engine: answers a closed query against a set of
//! abstract structures by checking validity of the characteristic-formula
//! implication over all 2-valued structures up to a node bound.
//!
//! The verdict is 1 when `gamma_hat(X) -> query` holds in every structure
//! up to the bound, 0 when `gamma_hat(X) -> !query` does, and 1/2
//! otherwise, in which case one satisfying and one refuting member of the
//! concretization are returned as witnesses. Both implications are decided
//! in a single pass that enumerates the models of `gamma_hat(X)` (the
//! filter pruning of [`StructureStream`] is what makes this affordable)
//! and folds the query's value over them. Verdicts are exact over the
//! examined domain and are always labelled with the bound.

use crate::abstraction::in_gamma;
use crate::charform::{gamma_hat, NodeFormulaMap};
use crate::error::Error;
use crate::logic::{Formula, Vocabulary};
use crate::semantics::Evaluator;
use crate::structures::{StructureStream, ThreeValuedStructure, TruthValue, TwoValuedStructure};

/// Search limits: the maximum universe size and the enumeration budget
/// (candidate table instantiations).
#[derive(Debug, Clone, Copy)]
pub struct QueryBounds {
    pub max_nodes: usize,
    pub budget: u64,
}

impl QueryBounds {
    pub fn nodes(max_nodes: usize) -> Self {
        QueryBounds { max_nodes, budget: u64::MAX }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Default bound for a set of abstract structures: the largest
    /// abstract universe plus two, so every summary node can stand for up
    /// to three concrete nodes.
    pub fn default_for(structures: &[ThreeValuedStructure]) -> Self {
        let largest = structures.iter().map(|s| s.node_count()).max().unwrap_or(0);
        QueryBounds::nodes(largest + 2)
    }
}

/// Outcome of a bounded validity check.
#[derive(Debug, Clone)]
pub struct Validity {
    pub valid: bool,
    /// First structure (in enumeration order) falsifying the formula.
    pub counterexample: Option<TwoValuedStructure>,
}

/// Verdict of a supervaluation query, labelled with the bound it was
/// computed under.
#[derive(Debug, Clone)]
pub struct BoundedVerdict {
    pub value: TruthValue,
    pub max_nodes: usize,
    /// Present exactly when `value` is 1/2.
    pub witnesses: Option<Witnesses>,
}

/// A pair of concretization members giving the query both values.
#[derive(Debug, Clone)]
pub struct Witnesses {
    pub satisfying: TwoValuedStructure,
    pub refuting: TwoValuedStructure,
}

fn require_closed(f: &Formula) -> Result<(), Error> {
    let free = f.free_variables();
    if !free.is_empty() || !f.free_set_variables().is_empty() {
        return Err(Error::NotClosed { vars: free.into_iter().collect() });
    }
    Ok(())
}

/// True iff every 2-valued structure over `voc` with at most
/// `bounds.max_nodes` nodes satisfies the closed formula; otherwise the
/// first counterexample in enumeration order is returned. Models of the
/// negation are enumerated directly, so implications with a conjunctive
/// premise prune well.
pub fn bounded_valid(
    formula: &Formula,
    voc: &Vocabulary,
    bounds: &QueryBounds,
) -> Result<Validity, Error> {
    require_closed(formula)?;
    formula.check(voc)?;
    let negated = Formula::not(formula.clone());
    let mut stream =
        StructureStream::new(voc, bounds.max_nodes, Some(&negated))?.with_budget(bounds.budget);
    match stream.next_structure()? {
        Some(counterexample) => Ok(Validity { valid: false, counterexample: Some(counterexample) }),
        None => Ok(Validity { valid: true, counterexample: None }),
    }
}

/// Supervaluational value of a closed query over the concretization of
/// `structures` restricted to `integrity`, up to the bound.
///
/// Node formulas are derived from boundedness; structures that are not
/// bounded are rejected. An empty concretization (no admissible model up
/// to the bound, which makes both implications hold vacuously) is reported
/// as [`Error::EmptyConcretization`].
pub fn supervaluate(
    query: &Formula,
    structures: &[ThreeValuedStructure],
    integrity: &Formula,
    bounds: &QueryBounds,
) -> Result<BoundedVerdict, Error> {
    require_closed(query)?;
    require_closed(integrity)?;
    if structures.is_empty() {
        return Err(Error::EmptyConcretization { max_nodes: bounds.max_nodes });
    }
    let voc = structures[0].vocabulary().clone();
    for s in structures {
        if s.vocabulary() != &voc {
            return Err(Error::VocabularyMismatch);
        }
    }
    let node_maps: Vec<NodeFormulaMap> =
        structures.iter().map(NodeFormulaMap::bounded).collect::<Result<_, _>>()?;
    let gamma = gamma_hat(structures, &node_maps, integrity)?;

    let mut stream =
        StructureStream::new(&voc, bounds.max_nodes, Some(&gamma))?.with_budget(bounds.budget);
    let mut evaluator = Evaluator::new();
    let mut satisfying: Option<TwoValuedStructure> = None;
    let mut refuting: Option<TwoValuedStructure> = None;
    while let Some(model) = stream.next_structure()? {
        if evaluator.eval_closed(&model, query)? {
            satisfying.get_or_insert(model);
        } else {
            refuting.get_or_insert(model);
        }
        if satisfying.is_some() && refuting.is_some() {
            break;
        }
    }
    let verdict = match (satisfying, refuting) {
        (None, None) => return Err(Error::EmptyConcretization { max_nodes: bounds.max_nodes }),
        (Some(_), None) => {
            BoundedVerdict { value: TruthValue::True, max_nodes: bounds.max_nodes, witnesses: None }
        }
        (None, Some(_)) => {
            BoundedVerdict { value: TruthValue::False, max_nodes: bounds.max_nodes, witnesses: None }
        }
        (Some(sat), Some(refut)) => {
            for witness in [&sat, &refut] {
                let member = structures
                    .iter()
                    .any(|s| in_gamma(witness, s, integrity).unwrap_or(false));
                assert!(member, "supervaluation witness escaped the concretization");
            }
            BoundedVerdict {
                value: TruthValue::Unknown,
                max_nodes: bounds.max_nodes,
                witnesses: Some(Witnesses { satisfying: sat, refuting: refut }),
            }
        }
    };
    Ok(verdict)
}

/// Checks whether `query` holds in every admissible structure represented
/// by `structures` up to the bound; the invariant-checking entry point
/// used by the CLI.
pub fn check_invariant(
    structures: &[ThreeValuedStructure],
    query: &Formula,
    integrity: &Formula,
    bounds: &QueryBounds,
) -> Result<BoundedVerdict, Error> {
    supervaluate(query, structures, integrity, bounds)
}

//! Generators for the formula families that characterize abstract
//! structures: per-value literals, node formulas for bounded structures,
//! the characteristic formula of a structure and its disjunction over a
//! set, the tightened variant for canonical abstraction, the existential
//! monadic second-order variant for arbitrary structures, and the built-in
//! integrity and query formulas for the list vocabulary.
//!
//! A characteristic formula has four parts: one existential witness per
//! abstract node (surjectivity), a totality disjunction (every concrete
//! node is represented), the definite nullary values, and per-predicate
//! implication blocks over all node tuples. Conjuncts whose conclusion
//! would be the trivial `1` (an indefinite abstract value) are omitted, so
//! formula size stays linear in the number of definite values.

use crate::abstraction::{ica_check, unseparated_pairs};
use crate::error::Error;
use crate::logic::{Formula, Var, Vocabulary};
use crate::structures::{ThreeValuedStructure, TruthValue};

/// The designated free variable of node formulas.
pub const NODE_VAR: &str = "w";

/// The literal describing value `value` of `pred` on the given variables:
/// the atom for 1, its negation for 0, and `1` (no constraint) for 1/2.
pub fn truth_char(
    voc: &Vocabulary,
    pred: &str,
    value: TruthValue,
    vars: &[&str],
) -> Result<Formula, Error> {
    let atom = Formula::atom(voc, pred, vars.iter().copied())?;
    Ok(match value {
        TruthValue::True => atom,
        TruthValue::False => Formula::not(atom),
        TruthValue::Unknown => Formula::True,
    })
}

/// True iff every pair of distinct nodes is separated by a unary predicate
/// with two differing definite values.
pub fn is_bounded(s: &ThreeValuedStructure) -> bool {
    unseparated_pairs(s).is_empty()
}

/// One formula per abstract node, each with the designated free variable
/// [`NODE_VAR`], picking out exactly the concrete nodes the abstract node
/// represents.
#[derive(Debug, Clone)]
pub struct NodeFormulaMap {
    formulas: Vec<Formula>,
}

impl NodeFormulaMap {
    /// Node formulas for a bounded structure: the conjunction of unary
    /// literals over the node's definite values.
    pub fn bounded(s: &ThreeValuedStructure) -> Result<Self, Error> {
        if let Some(&(u, v)) = unseparated_pairs(s).first() {
            return Err(Error::NotBounded {
                u1: s.node_ids()[u].clone(),
                u2: s.node_ids()[v].clone(),
            });
        }
        let voc = s.vocabulary();
        let mut formulas = Vec::with_capacity(s.node_count());
        for u in 0..s.node_count() {
            let mut literals = Vec::new();
            for p in voc.unary_indices() {
                let value = s.get(p, &[u]);
                if value.is_definite() {
                    literals.push(truth_char(voc, voc.name(p), value, &[NODE_VAR])?);
                }
            }
            formulas.push(Formula::and_all(literals));
        }
        Ok(NodeFormulaMap { formulas })
    }

    /// User-supplied node formulas, one line per node:
    /// `nodeformula <nodeId> := <formula with free variable w>`.
    /// Needed for structures that are identifiable but not bounded.
    pub fn from_lines(text: &str, s: &ThreeValuedStructure) -> Result<Self, Error> {
        let voc = s.vocabulary();
        let mut formulas: Vec<Option<Formula>> = vec![None; s.node_count()];
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            let rest = line.trim().strip_prefix("nodeformula ").ok_or_else(|| {
                Error::StructureFile {
                    line: lineno,
                    msg: "expected `nodeformula <id> := <formula>`".into(),
                }
            })?;
            let (id, body) = rest.split_once(":=").ok_or_else(|| Error::StructureFile {
                line: lineno,
                msg: "missing `:=`".into(),
            })?;
            let id = id.trim();
            let node = s.node_index(id).ok_or_else(|| Error::StructureFile {
                line: lineno,
                msg: format!("unknown node `{id}`"),
            })?;
            let f = crate::logic::parse_formula(body.trim(), voc)?;
            let free = f.free_variables();
            if free.iter().any(|v| v != NODE_VAR) {
                return Err(Error::StructureFile {
                    line: lineno,
                    msg: format!("node formula may only have `{NODE_VAR}` free, got {free:?}"),
                });
            }
            if formulas[node].is_some() {
                return Err(Error::StructureFile {
                    line: lineno,
                    msg: format!("duplicate node `{id}`"),
                });
            }
            formulas[node] = Some(f);
        }
        let mut out = Vec::with_capacity(s.node_count());
        for (u, f) in formulas.into_iter().enumerate() {
            out.push(f.ok_or_else(|| Error::MissingNodeFormula { node: s.node_ids()[u].clone() })?);
        }
        Ok(NodeFormulaMap { formulas: out })
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    /// The node formula with its designated variable renamed to `at`
    /// (capture-avoiding).
    pub fn instantiate(&self, node: usize, at: &str) -> Formula {
        self.formulas[node].substitute_var(&NODE_VAR.to_string(), &at.to_string())
    }
}

/// Options for [`characteristic_formula_with`]. Unary predicate blocks are
/// implied by the totality part when node formulas are the bounded ones,
/// so they may be dropped; they are kept by default.
#[derive(Debug, Clone, Copy, Default)]
pub struct CharOptions {
    pub skip_unary_blocks: bool,
}

/// The characteristic formula of `s`: its 2-valued models are exactly the
/// structures that embed into `s` (for faithful node formulas).
pub fn characteristic_formula(
    s: &ThreeValuedStructure,
    nodes: &NodeFormulaMap,
) -> Result<Formula, Error> {
    characteristic_formula_with(s, nodes, CharOptions::default())
}

pub fn characteristic_formula_with(
    s: &ThreeValuedStructure,
    nodes: &NodeFormulaMap,
    opts: CharOptions,
) -> Result<Formula, Error> {
    if nodes.len() != s.node_count() {
        let missing = s.node_ids().get(nodes.len()).cloned().unwrap_or_default();
        return Err(Error::MissingNodeFormula { node: missing });
    }
    let mut parts = Vec::new();
    for u in 0..s.node_count() {
        parts.push(Formula::exists("v", nodes.instantiate(u, "v")));
    }
    parts.push(totality_part(s, nodes));
    parts.extend(nullary_part(s)?);
    parts.extend(predicate_blocks(s, nodes, opts)?);
    Ok(Formula::and_all(parts))
}

fn totality_part(s: &ThreeValuedStructure, nodes: &NodeFormulaMap) -> Formula {
    let disjuncts: Vec<Formula> = (0..s.node_count()).map(|u| nodes.instantiate(u, NODE_VAR)).collect();
    Formula::forall(NODE_VAR, Formula::or_all(disjuncts))
}

fn nullary_part(s: &ThreeValuedStructure) -> Result<Vec<Formula>, Error> {
    let voc = s.vocabulary();
    let mut out = Vec::new();
    for p in voc.nullary_indices() {
        let value = s.get(p, &[]);
        if value.is_definite() {
            out.push(truth_char(voc, voc.name(p), value, &[])?);
        }
    }
    Ok(out)
}

fn block_vars(arity: usize) -> Vec<String> {
    (1..=arity).map(|i| format!("w{i}")).collect()
}

/// One implication block per predicate of arity >= 1: every concrete tuple
/// matching a node tuple with a definite value must carry that value.
fn predicate_blocks(
    s: &ThreeValuedStructure,
    nodes: &NodeFormulaMap,
    opts: CharOptions,
) -> Result<Vec<Formula>, Error> {
    let voc = s.vocabulary();
    let n = s.node_count();
    let mut out = Vec::new();
    for arity in 1..=voc.max_arity() {
        if arity == 1 && opts.skip_unary_blocks {
            continue;
        }
        for p in voc.indices_of_arity(arity) {
            let vars = block_vars(arity);
            let var_refs: Vec<&str> = vars.iter().map(|v| v.as_str()).collect();
            let mut conjuncts = Vec::new();
            let mut tuple = Vec::new();
            for idx in 0..crate::structures::table_len(n, arity) {
                crate::structures::decode_tuple(n, arity, idx, &mut tuple);
                let value = s.get(p, &tuple);
                if !value.is_definite() {
                    continue;
                }
                let premise = Formula::and_all(
                    tuple.iter().enumerate().map(|(j, &u)| nodes.instantiate(u, &vars[j])),
                );
                let conclusion = truth_char(voc, voc.name(p), value, &var_refs)?;
                conjuncts.push(Formula::implies(premise, conclusion));
            }
            if !conjuncts.is_empty() {
                out.push(Formula::forall_all(vars, Formula::and_all(conjuncts)));
            }
        }
    }
    Ok(out)
}

/// `F` conjoined with the disjunction of the characteristic formulas of
/// `structures`. An empty set yields `F & 0`, whose model set is empty.
pub fn gamma_hat(
    structures: &[ThreeValuedStructure],
    node_maps: &[NodeFormulaMap],
    integrity: &Formula,
) -> Result<Formula, Error> {
    assert_eq!(structures.len(), node_maps.len(), "one node map per structure");
    let mut xis = Vec::with_capacity(structures.len());
    for (s, nodes) in structures.iter().zip(node_maps) {
        xis.push(characteristic_formula(s, nodes)?);
    }
    Ok(Formula::and(integrity.clone(), Formula::or_all(xis)))
}

/// The characteristic formula for canonical abstraction: the plain
/// characteristic formula plus, for every indefinite entry of arity >= 2,
/// a positive and a negative existential witness. Its models are exactly
/// the admissible structures whose canonical abstraction is `s`.
pub fn tau_formula(s: &ThreeValuedStructure) -> Result<Formula, Error> {
    let violations = ica_check(s);
    if !violations.is_empty() {
        return Err(Error::IcaViolations(violations));
    }
    let nodes = NodeFormulaMap::bounded(s)?;
    let voc = s.vocabulary();
    let n = s.node_count();
    let mut parts = vec![characteristic_formula(s, &nodes)?];
    for arity in 2..=voc.max_arity() {
        for p in voc.indices_of_arity(arity) {
            let vars = block_vars(arity);
            let var_refs: Vec<&str> = vars.iter().map(|v| v.as_str()).collect();
            let mut tuple = Vec::new();
            for idx in 0..crate::structures::table_len(n, arity) {
                crate::structures::decode_tuple(n, arity, idx, &mut tuple);
                if s.get(p, &tuple) != TruthValue::Unknown {
                    continue;
                }
                let atom = Formula::atom(voc, voc.name(p), var_refs.iter().copied())?;
                for literal in [atom.clone(), Formula::not(atom)] {
                    let mut body: Vec<Formula> = tuple
                        .iter()
                        .enumerate()
                        .map(|(j, &u)| nodes.instantiate(u, &vars[j]))
                        .collect();
                    body.push(literal);
                    parts.push(Formula::exists_all(vars.clone(), Formula::and_all(body)));
                }
            }
        }
    }
    Ok(Formula::and_all(parts))
}

/// `F` conjoined with the disjunction of tightened characteristic formulas.
pub fn gamma_hat_c(
    structures: &[ThreeValuedStructure],
    integrity: &Formula,
) -> Result<Formula, Error> {
    let mut taus = Vec::with_capacity(structures.len());
    for s in structures {
        taus.push(tau_formula(s)?);
    }
    Ok(Formula::and(integrity.clone(), Formula::or_all(taus)))
}

/// The existential monadic second-order characteristic formula, which
/// works for arbitrary 3-valued structures: one set variable per abstract
/// node stands for its concrete preimage, and membership replaces the node
/// formulas.
pub fn np_char_formula(s: &ThreeValuedStructure) -> Result<Formula, Error> {
    let voc = s.vocabulary();
    let n = s.node_count();
    let set_vars: Vec<Var> = (1..=n).map(|i| format!("V{i}")).collect();
    let member = |node: usize, at: &str| Formula::SetMember(at.to_string(), set_vars[node].clone());

    let mut parts = Vec::new();
    // Non-emptiness: the preimage of every abstract node is inhabited.
    for u in 0..n {
        parts.push(Formula::exists(NODE_VAR, member(u, NODE_VAR)));
    }
    // Pairwise disjointness of the preimages.
    for k in 0..n {
        for j in k + 1..n {
            let premise = Formula::and(member(k, "w1"), member(j, "w2"));
            let conclusion = Formula::not(Formula::atom(voc, crate::logic::EQ, ["w1", "w2"])?);
            parts.push(Formula::forall_all(["w1", "w2"], Formula::implies(premise, conclusion)));
        }
    }
    // Totality.
    parts.push(Formula::forall(
        NODE_VAR,
        Formula::or_all((0..n).map(|u| member(u, NODE_VAR))),
    ));
    parts.extend(nullary_part(s)?);
    // Predicate blocks with membership tests as node formulas.
    for arity in 1..=voc.max_arity() {
        for p in voc.indices_of_arity(arity) {
            let vars = block_vars(arity);
            let var_refs: Vec<&str> = vars.iter().map(|v| v.as_str()).collect();
            let mut conjuncts = Vec::new();
            let mut tuple = Vec::new();
            for idx in 0..crate::structures::table_len(n, arity) {
                crate::structures::decode_tuple(n, arity, idx, &mut tuple);
                let value = s.get(p, &tuple);
                if !value.is_definite() {
                    continue;
                }
                let premise =
                    Formula::and_all(tuple.iter().enumerate().map(|(j, &u)| member(u, &vars[j])));
                let conclusion = truth_char(voc, voc.name(p), value, &var_refs)?;
                conjuncts.push(Formula::implies(premise, conclusion));
            }
            if !conjuncts.is_empty() {
                parts.push(Formula::forall_all(vars, Formula::and_all(conjuncts)));
            }
        }
    }
    let body = Formula::and_all(parts);
    Ok(if n == 0 { body } else { Formula::ExistsSets(set_vars, Box::new(body)) })
}

/// `F` conjoined with the disjunction of NP characteristic formulas.
pub fn gamma_hat_np(
    structures: &[ThreeValuedStructure],
    integrity: &Formula,
) -> Result<Formula, Error> {
    let mut nps = Vec::with_capacity(structures.len());
    for s in structures {
        nps.push(np_char_formula(s)?);
    }
    Ok(Formula::and(integrity.clone(), Formula::or_all(nps)))
}

fn require_preds(voc: &Vocabulary, names: &[&str]) -> Result<(), Error> {
    for name in names {
        if !voc.contains(name) {
            return Err(Error::UnknownPredicate { name: name.to_string() });
        }
    }
    Ok(())
}

/// The integrity formula for the list vocabulary, over the given pointer
/// variables: (a) every pointer variable points to at most one node,
/// (b) `n` is a partial function, (c) `is` marks exactly the nodes with
/// two or more distinct predecessors (emitted only when `is` is declared),
/// and (d) each reachability predicate matches reflexive-transitive
/// reachability through `n` from its pointer variable.
pub fn list_integrity_formula(voc: &Vocabulary, pvar: &[&str]) -> Result<Formula, Error> {
    require_preds(voc, &["n"])?;
    for q in pvar {
        require_preds(voc, &[q, &format!("r_{q}")])?;
    }
    let mut parts = Vec::new();
    for q in pvar {
        let premise =
            Formula::and(Formula::atom(voc, q, ["v1"])?, Formula::atom(voc, q, ["v2"])?);
        let conclusion = Formula::atom(voc, crate::logic::EQ, ["v1", "v2"])?;
        parts.push(Formula::forall_all(["v1", "v2"], Formula::implies(premise, conclusion)));
    }
    let premise = Formula::and(
        Formula::atom(voc, "n", ["v", "v1"])?,
        Formula::atom(voc, "n", ["v", "v2"])?,
    );
    let conclusion = Formula::atom(voc, crate::logic::EQ, ["v1", "v2"])?;
    parts.push(Formula::forall_all(["v", "v1", "v2"], Formula::implies(premise, conclusion)));
    if voc.contains("is") {
        let shared = Formula::exists_all(
            ["v1", "v2"],
            Formula::and_all([
                Formula::not(Formula::atom(voc, crate::logic::EQ, ["v1", "v2"])?),
                Formula::atom(voc, "n", ["v1", "v"])?,
                Formula::atom(voc, "n", ["v2", "v"])?,
            ]),
        );
        parts.push(Formula::forall("v", Formula::iff(Formula::atom(voc, "is", ["v"])?, shared)));
    }
    for q in pvar {
        let reach = Formula::exists(
            "v1",
            Formula::and(Formula::atom(voc, q, ["v1"])?, Formula::tc_star("n", "v1", "v")),
        );
        parts.push(Formula::forall(
            "v",
            Formula::iff(Formula::atom(voc, &format!("r_{q}"), ["v"])?, reach),
        ));
    }
    Ok(Formula::and_all(parts))
}

/// The three standard list queries over `x`: acyclicity along `n` within
/// the reachable region, absence of sharing there, and their conjunction.
#[derive(Debug, Clone)]
pub struct ListQueries {
    pub acyclic: Formula,
    pub unshared: Formula,
    pub list: Formula,
}

pub fn list_x_queries(voc: &Vocabulary) -> Result<ListQueries, Error> {
    require_preds(voc, &["x", "r_x", "n"])?;
    let acyclic = Formula::forall_all(
        ["v1", "v2"],
        Formula::implies(
            Formula::and(Formula::atom(voc, "r_x", ["v1"])?, Formula::tc_plus("n", "v1", "v2")),
            Formula::not(Formula::tc_plus("n", "v2", "v1")),
        ),
    );
    let unshared = Formula::forall(
        "v",
        Formula::implies(
            Formula::atom(voc, "r_x", ["v"])?,
            Formula::not(Formula::exists_all(
                ["w1", "w2"],
                Formula::and_all([
                    Formula::not(Formula::atom(voc, crate::logic::EQ, ["w1", "w2"])?),
                    Formula::atom(voc, "n", ["w1", "v"])?,
                    Formula::atom(voc, "n", ["w2", "v"])?,
                ]),
            )),
        ),
    );
    let list = Formula::and(acyclic.clone(), unshared.clone());
    Ok(ListQueries { acyclic, unshared, list })
}

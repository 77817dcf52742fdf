//! Embedding search, concretization membership, canonical abstraction, and
//! the image-of-canonical-abstraction (ICA) conditions.
//!
//! An embedding is a surjective node map under which every concrete
//! predicate value sits below the abstract value in the information order.
//! Canonical abstraction maps concrete nodes by their canonical name (the
//! definite unary-predicate signature) and joins predicate values over the
//! preimages, which is the tightest abstract structure for that map.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::logic::Formula;
use crate::semantics::eval2_closed;
use crate::structures::{ThreeValuedStructure, TruthValue, TwoValuedStructure, Violation};

/// Default cap on backtracking steps for [`find_embedding`].
const DEFAULT_EMBED_BUDGET: u64 = 50_000_000;

/// A surjective map from concrete to abstract nodes satisfying the
/// embedding condition on every predicate tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingWitness {
    map: Vec<usize>,
}

impl EmbeddingWitness {
    /// Wraps an explicit concrete-to-abstract node map.
    pub fn from_map(map: Vec<usize>) -> Self {
        EmbeddingWitness { map }
    }

    /// Image of the `i`-th concrete node.
    pub fn image(&self, concrete: usize) -> usize {
        self.map[concrete]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// The map as `(concrete id, abstract id)` pairs in concrete node order.
    pub fn pairs<'a>(
        &self,
        concrete: &'a TwoValuedStructure,
        abstracted: &'a ThreeValuedStructure,
    ) -> Vec<(&'a str, &'a str)> {
        self.map
            .iter()
            .enumerate()
            .map(|(c, &a)| (concrete.node_ids()[c].as_str(), abstracted.node_ids()[a].as_str()))
            .collect()
    }

    /// Re-checks surjectivity and the per-tuple embedding condition.
    pub fn verify(&self, concrete: &TwoValuedStructure, abstracted: &ThreeValuedStructure) -> bool {
        if self.map.len() != concrete.node_count() {
            return false;
        }
        let m = abstracted.node_count();
        let mut hit = vec![false; m];
        for &a in &self.map {
            if a >= m {
                return false;
            }
            hit[a] = true;
        }
        if hit.iter().any(|h| !h) {
            return false;
        }
        let voc = concrete.vocabulary();
        let mut tuple = Vec::new();
        let mut image = Vec::new();
        for (p, decl) in voc.decls() {
            let total = crate::structures::table_len(concrete.node_count(), decl.arity);
            for idx in 0..total {
                crate::structures::decode_tuple(concrete.node_count(), decl.arity, idx, &mut tuple);
                image.clear();
                image.extend(tuple.iter().map(|&u| self.map[u]));
                if !concrete.truth(p, &tuple).info_leq(abstracted.get(p, &image)) {
                    return false;
                }
            }
        }
        true
    }
}

use crate::structures::Structure;

/// Searches for an embedding of `concrete` into `abstracted` with the
/// default step budget. Returns the first witness in search order
/// (concrete nodes assigned in universe order, abstract candidates tried
/// in universe order), or `None` if no embedding exists.
pub fn find_embedding(
    concrete: &TwoValuedStructure,
    abstracted: &ThreeValuedStructure,
) -> Result<Option<EmbeddingWitness>, Error> {
    find_embedding_budgeted(concrete, abstracted, DEFAULT_EMBED_BUDGET)
}

pub fn find_embedding_budgeted(
    concrete: &TwoValuedStructure,
    abstracted: &ThreeValuedStructure,
    budget: u64,
) -> Result<Option<EmbeddingWitness>, Error> {
    if concrete.vocabulary() != abstracted.vocabulary() {
        return Err(Error::VocabularyMismatch);
    }
    let voc = concrete.vocabulary();
    let n = concrete.node_count();
    let m = abstracted.node_count();
    // A surjection needs at least as many sources as targets; an empty
    // abstract universe admits only the empty concrete structure.
    if n < m || (m == 0 && n > 0) {
        return Ok(None);
    }
    for p in voc.nullary_indices() {
        if !concrete.truth(p, &[]).info_leq(abstracted.get(p, &[])) {
            return Ok(None);
        }
    }
    // Per-node candidates compatible on every unary predicate.
    let unaries = voc.unary_indices();
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
    for u in 0..n {
        let mut cands = Vec::new();
        'next: for a in 0..m {
            for &p in &unaries {
                if !concrete.truth(p, &[u]).info_leq(abstracted.get(p, &[a])) {
                    continue 'next;
                }
            }
            cands.push(a);
        }
        if cands.is_empty() {
            return Ok(None);
        }
        candidates.push(cands);
    }

    let wide: Vec<usize> = (0..voc.len()).filter(|&p| voc.arity(p) >= 2).collect();
    let mut search = EmbedSearch {
        concrete,
        abstracted,
        wide: &wide,
        candidates: &candidates,
        map: vec![usize::MAX; n],
        hits: vec![0usize; m],
        unhit: m,
        steps: 0,
        budget,
    };
    match search.assign(0) {
        Ok(true) => Ok(Some(EmbeddingWitness { map: search.map })),
        Ok(false) => Ok(None),
        Err(e) => Err(e),
    }
}

struct EmbedSearch<'a> {
    concrete: &'a TwoValuedStructure,
    abstracted: &'a ThreeValuedStructure,
    wide: &'a [usize],
    candidates: &'a [Vec<usize>],
    map: Vec<usize>,
    hits: Vec<usize>,
    unhit: usize,
    steps: u64,
    budget: u64,
}

impl EmbedSearch<'_> {
    fn assign(&mut self, node: usize) -> Result<bool, Error> {
        let n = self.concrete.node_count();
        if node == n {
            return Ok(self.unhit == 0);
        }
        // Remaining nodes must be able to cover the abstract nodes not yet hit.
        if n - node < self.unhit {
            return Ok(false);
        }
        for idx in 0..self.candidates[node].len() {
            let a = self.candidates[node][idx];
            self.steps += 1;
            if self.steps > self.budget {
                return Err(Error::BudgetExceeded { examined: self.steps, budget: self.budget });
            }
            self.map[node] = a;
            if self.tuples_ok(node) {
                if self.hits[a] == 0 {
                    self.unhit -= 1;
                }
                self.hits[a] += 1;
                if self.assign(node + 1)? {
                    return Ok(true);
                }
                self.hits[a] -= 1;
                if self.hits[a] == 0 {
                    self.unhit += 1;
                }
            }
        }
        self.map[node] = usize::MAX;
        Ok(false)
    }

    /// Checks every tuple over the assigned prefix that mentions `node`,
    /// for all predicates of arity >= 2 (including `eq`).
    fn tuples_ok(&self, node: usize) -> bool {
        let assigned = node + 1;
        'preds: for &p in self.wide {
            let arity = self.concrete.vocabulary().arity(p);
            let mut tuple = vec![0usize; arity];
            let mut image = vec![0usize; arity];
            'tuples: loop {
                if tuple.contains(&node) {
                    for (slot, &u) in tuple.iter().enumerate() {
                        image[slot] = self.map[u];
                    }
                    let cv = self.concrete.truth(p, &tuple);
                    if !cv.info_leq(self.abstracted.get(p, &image)) {
                        return false;
                    }
                }
                // Odometer over tuples drawn from the assigned prefix; a
                // full wrap moves on to the next predicate.
                let mut slot = arity;
                while slot > 0 {
                    slot -= 1;
                    tuple[slot] += 1;
                    if tuple[slot] < assigned {
                        continue 'tuples;
                    }
                    tuple[slot] = 0;
                }
                continue 'preds;
            }
        }
        true
    }
}

/// Concretization membership: `concrete` embeds into `abstracted` and
/// satisfies the closed integrity formula.
pub fn in_gamma(
    concrete: &TwoValuedStructure,
    abstracted: &ThreeValuedStructure,
    integrity: &Formula,
) -> Result<bool, Error> {
    require_closed(integrity)?;
    if find_embedding(concrete, abstracted)?.is_none() {
        return Ok(false);
    }
    eval2_closed(concrete, integrity)
}

fn require_closed(f: &Formula) -> Result<(), Error> {
    let free = f.free_variables();
    if !free.is_empty() {
        return Err(Error::NotClosed { vars: free.into_iter().collect() });
    }
    Ok(())
}

/// A node's canonical name: the unary predicates definitely true at it and
/// those definitely false at it. Indefinite unary values fall in neither
/// set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CanonicalName {
    pub true_preds: BTreeSet<String>,
    pub false_preds: BTreeSet<String>,
}

impl std::fmt::Display for CanonicalName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |set: &BTreeSet<String>| set.iter().cloned().collect::<Vec<_>>().join(",");
        write!(f, "{{{}}},{{{}}}", join(&self.true_preds), join(&self.false_preds))
    }
}

/// Canonical name of a node in either kind of structure.
pub fn canonical_name<S: Structure>(s: &S, node: usize) -> Result<CanonicalName, Error> {
    if node >= s.node_count() {
        return Err(Error::UnknownNode { id: format!("#{node}") });
    }
    let voc = s.vocabulary();
    let mut name = CanonicalName { true_preds: BTreeSet::new(), false_preds: BTreeSet::new() };
    for p in voc.unary_indices() {
        match s.truth(p, &[node]) {
            TruthValue::True => {
                name.true_preds.insert(voc.name(p).to_string());
            }
            TruthValue::False => {
                name.false_preds.insert(voc.name(p).to_string());
            }
            TruthValue::Unknown => {}
        }
    }
    Ok(name)
}

/// Canonical abstraction: merges concrete nodes with equal canonical names
/// and joins every predicate value over the preimage tuples. Returns the
/// abstract structure (nodes named `u1..um` in first-occurrence order) and
/// the concrete-to-abstract node map.
pub fn canonical_abstraction(concrete: &TwoValuedStructure) -> (ThreeValuedStructure, Vec<usize>) {
    let voc = concrete.vocabulary();
    let unaries = voc.unary_indices();
    let n = concrete.node_count();

    let signature = |u: usize| -> u64 {
        let mut sig = 0u64;
        for (bit, &p) in unaries.iter().enumerate() {
            if concrete.get(p, &[u]) {
                sig |= 1 << bit;
            }
        }
        sig
    };

    let mut groups: Vec<u64> = Vec::new();
    let mut map = Vec::with_capacity(n);
    for u in 0..n {
        let sig = signature(u);
        let g = match groups.iter().position(|&s| s == sig) {
            Some(g) => g,
            None => {
                groups.push(sig);
                groups.len() - 1
            }
        };
        map.push(g);
    }

    let ids: Vec<String> = (1..=groups.len()).map(|g| format!("u{g}")).collect();
    let mut out = ThreeValuedStructure::new(voc, ids).expect("fresh abstract ids");
    let mut tuple = Vec::new();
    let mut image = Vec::new();
    for (p, decl) in voc.decls() {
        let total = crate::structures::table_len(n, decl.arity);
        let mut acc: Vec<Option<TruthValue>> =
            vec![None; crate::structures::table_len(groups.len(), decl.arity)];
        for idx in 0..total {
            crate::structures::decode_tuple(n, decl.arity, idx, &mut tuple);
            image.clear();
            image.extend(tuple.iter().map(|&u| map[u]));
            let value = concrete.truth(p, &tuple);
            let slot = crate::structures::tuple_index(groups.len(), &image);
            acc[slot] = Some(match acc[slot] {
                None => value,
                Some(prev) => prev.join(value),
            });
        }
        for (idx, value) in acc.into_iter().enumerate() {
            if let Some(v) = value {
                crate::structures::decode_tuple(groups.len(), decl.arity, idx, &mut tuple);
                out.set(p, &tuple, v);
            }
        }
    }
    (out, map)
}

pub(crate) fn unseparated_pairs(s: &ThreeValuedStructure) -> Vec<(usize, usize)> {
    let voc = s.vocabulary();
    let unaries = voc.unary_indices();
    let n = s.node_count();
    let mut out = Vec::new();
    for u in 0..n {
        'pair: for v in u + 1..n {
            for &p in &unaries {
                let a = s.get(p, &[u]);
                let b = s.get(p, &[v]);
                if a != b && a.is_definite() && b.is_definite() {
                    continue 'pair;
                }
            }
            out.push((u, v));
        }
    }
    out
}

/// Necessary conditions for a structure to be the canonical abstraction of
/// some 2-valued structure: bounded, with definite nullary and unary
/// values. An empty result does not certify the existence of a concrete
/// witness; pair it with a bounded search when that matters.
pub fn ica_check(s: &ThreeValuedStructure) -> Vec<Violation> {
    let voc = s.vocabulary();
    let mut out = Vec::new();
    for (u, v) in unseparated_pairs(s) {
        out.push(Violation::NotBounded {
            node1: s.node_ids()[u].clone(),
            node2: s.node_ids()[v].clone(),
        });
    }
    for p in voc.nullary_indices() {
        if s.get(p, &[]) == TruthValue::Unknown {
            out.push(Violation::IndefiniteNullary { pred: voc.name(p).to_string() });
        }
    }
    for p in voc.unary_indices() {
        for u in 0..s.node_count() {
            if s.get(p, &[u]) == TruthValue::Unknown {
                out.push(Violation::IndefiniteUnary {
                    pred: voc.name(p).to_string(),
                    node: s.node_ids()[u].clone(),
                });
            }
        }
    }
    out
}

fn require_ica(s: &ThreeValuedStructure) -> Result<(), Error> {
    let violations = ica_check(s);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::IcaViolations(violations))
    }
}

/// Bounded witness search for the abstraction-image property: looks for a
/// 2-valued structure with at most `max_nodes` nodes whose canonical
/// abstraction is isomorphic to `s`. The conditions checked by
/// [`ica_check`] are necessary but not sufficient, so a `None` here only
/// rules out witnesses up to the bound.
pub fn find_ica_witness(
    s: &ThreeValuedStructure,
    max_nodes: usize,
    budget: u64,
) -> Result<Option<TwoValuedStructure>, Error> {
    require_ica(s)?;
    let mut stream = crate::structures::StructureStream::new(s.vocabulary(), max_nodes, None)?
        .with_budget(budget);
    while let Some(candidate) = stream.next_structure()? {
        let (beta, _) = canonical_abstraction(&candidate);
        if ica_isomorphic(&beta, s)? {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// Isomorphism of two ICA-shaped structures, decided by matching canonical
/// names (which are unique per node once the ICA conditions hold) and
/// comparing every predicate value under the induced bijection.
pub fn ica_isomorphic(a: &ThreeValuedStructure, b: &ThreeValuedStructure) -> Result<bool, Error> {
    if a.vocabulary() != b.vocabulary() {
        return Err(Error::VocabularyMismatch);
    }
    let n = a.node_count();
    if n != b.node_count() {
        return Ok(false);
    }
    let names_a: Vec<CanonicalName> =
        (0..n).map(|u| canonical_name(a, u)).collect::<Result<_, _>>()?;
    let names_b: Vec<CanonicalName> =
        (0..n).map(|u| canonical_name(b, u)).collect::<Result<_, _>>()?;
    let mut map = Vec::with_capacity(n);
    for name in &names_a {
        match names_b.iter().position(|m| m == name) {
            Some(j) => map.push(j),
            None => return Ok(false),
        }
    }
    // Canonical names must be distinguishing on both sides.
    let mut seen = vec![false; n];
    for &j in &map {
        if seen[j] {
            return Ok(false);
        }
        seen[j] = true;
    }
    let voc = a.vocabulary();
    let mut tuple = Vec::new();
    let mut image = Vec::new();
    for (p, decl) in voc.decls() {
        for idx in 0..crate::structures::table_len(n, decl.arity) {
            crate::structures::decode_tuple(n, decl.arity, idx, &mut tuple);
            image.clear();
            image.extend(tuple.iter().map(|&u| map[u]));
            if a.get(p, &tuple) != b.get(p, &image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Membership in the concretization of an ICA structure: `concrete`
/// satisfies the integrity formula and its canonical abstraction is
/// isomorphic to `abstracted`.
pub fn in_gamma_c(
    concrete: &TwoValuedStructure,
    abstracted: &ThreeValuedStructure,
    integrity: &Formula,
) -> Result<bool, Error> {
    require_ica(abstracted)?;
    require_closed(integrity)?;
    if concrete.vocabulary() != abstracted.vocabulary() {
        return Err(Error::VocabularyMismatch);
    }
    let (beta, _) = canonical_abstraction(concrete);
    if !ica_isomorphic(&beta, abstracted)? {
        return Ok(false);
    }
    eval2_closed(concrete, integrity)
}

/// Membership in the complement of `gamma_c(abstracted)` relative to the
/// integrity-satisfying domain: the concrete structure is admissible but
/// abstracts to something else.
pub fn in_ica_complement(
    concrete: &TwoValuedStructure,
    abstracted: &ThreeValuedStructure,
    integrity: &Formula,
) -> Result<bool, Error> {
    require_ica(abstracted)?;
    require_closed(integrity)?;
    if !eval2_closed(concrete, integrity)? {
        return Ok(false);
    }
    Ok(!in_gamma_c(concrete, abstracted, integrity)?)
}

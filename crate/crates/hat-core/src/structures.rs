//! Finite 2-valued and 3-valued logical structures over a vocabulary,
//! the three-point truth lattice, and structural validation.
//!
//! Interpretations are stored densely: one table per predicate with
//! `n^arity` entries in row-major tuple order. Structures are immutable
//! once built (construct, set values, then share).

use std::collections::HashSet;
use std::fmt;

use crate::error::Error;
use crate::logic::Vocabulary;

mod enumerate;
mod file;

pub use enumerate::{enumerate_structures, predicted_structure_count, EnumStats, StructureStream};
pub use file::{parse_structure_file, write_structure_file, StructureFile};

/// The three-point lattice `{0, 1, 1/2}`.
///
/// Two orders live on this set: the information order (`0` and `1` below
/// `1/2`) used for embedding and join, and the truth order (`0 < 1/2 < 1`)
/// used by the Kleene connectives. Neither is exposed as `Ord`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruthValue {
    False,
    True,
    Unknown,
}

impl TruthValue {
    pub fn from_bool(b: bool) -> TruthValue {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    pub fn is_definite(self) -> bool {
        self != TruthValue::Unknown
    }

    /// Definite values convert to `bool`; `1/2` does not.
    pub fn as_bool(self) -> Option<bool> {
        match self {
            TruthValue::False => Some(false),
            TruthValue::True => Some(true),
            TruthValue::Unknown => None,
        }
    }

    /// Information order: `l1 ⊑ l2` iff `l1 = l2` or `l2 = 1/2`.
    pub fn info_leq(self, other: TruthValue) -> bool {
        self == other || other == TruthValue::Unknown
    }

    /// Least upper bound in the information order: equal values join to
    /// themselves, anything else joins to `1/2`.
    pub fn join(self, other: TruthValue) -> TruthValue {
        if self == other {
            self
        } else {
            TruthValue::Unknown
        }
    }

    /// Kleene negation: flips `0`/`1`, fixes `1/2`.
    pub fn kleene_not(self) -> TruthValue {
        match self {
            TruthValue::False => TruthValue::True,
            TruthValue::True => TruthValue::False,
            TruthValue::Unknown => TruthValue::Unknown,
        }
    }

    /// Kleene disjunction: maximum in the truth order `0 < 1/2 < 1`.
    pub fn kleene_or(self, other: TruthValue) -> TruthValue {
        match (self, other) {
            (TruthValue::True, _) | (_, TruthValue::True) => TruthValue::True,
            (TruthValue::Unknown, _) | (_, TruthValue::Unknown) => TruthValue::Unknown,
            _ => TruthValue::False,
        }
    }

    /// Kleene conjunction: minimum in the truth order.
    pub fn kleene_and(self, other: TruthValue) -> TruthValue {
        match (self, other) {
            (TruthValue::False, _) | (_, TruthValue::False) => TruthValue::False,
            (TruthValue::Unknown, _) | (_, TruthValue::Unknown) => TruthValue::Unknown,
            _ => TruthValue::True,
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruthValue::False => write!(f, "0"),
            TruthValue::True => write!(f, "1"),
            TruthValue::Unknown => write!(f, "1/2"),
        }
    }
}

impl std::str::FromStr for TruthValue {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "0" => Ok(TruthValue::False),
            "1" => Ok(TruthValue::True),
            "1/2" => Ok(TruthValue::Unknown),
            _ => Err(()),
        }
    }
}

/// Index of a tuple in a row-major dense table over `n` nodes.
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    let mut idx = 0usize;
    for &t in tuple {
        debug_assert!(t < n);
        idx = idx * n + t;
    }
    idx
}

/// Writes the `pos`-th tuple (row-major order) into `buf`.
pub fn decode_tuple(n: usize, arity: usize, mut pos: usize, buf: &mut Vec<usize>) {
    buf.clear();
    buf.resize(arity, 0);
    for slot in (0..arity).rev() {
        buf[slot] = pos % n;
        pos /= n;
    }
}

/// Number of entries in a dense table: `n^arity`.
pub fn table_len(n: usize, arity: usize) -> usize {
    n.pow(arity as u32)
}

/// Read-only view shared by 2-valued and 3-valued structures.
pub trait Structure {
    fn vocabulary(&self) -> &Vocabulary;
    fn node_ids(&self) -> &[String];
    /// Value of `pred` on a tuple of node indices, as a truth value.
    fn truth(&self, pred: usize, tuple: &[usize]) -> TruthValue;

    fn node_count(&self) -> usize {
        self.node_ids().len()
    }

    fn node_index(&self, id: &str) -> Option<usize> {
        self.node_ids().iter().position(|n| n == id)
    }
}

/// A violation of a structural invariant; produced by [`TwoValuedStructure::validate`],
/// [`ThreeValuedStructure::validate`], the file loader, and the ICA checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `eq(u,u)` must be 1 in a 2-valued structure and 1 or 1/2 in a
    /// 3-valued structure.
    EqDiagonal { node: String, value: TruthValue },
    /// `eq(u1,u2)` must be 0 for distinct nodes.
    EqOffDiagonal { node1: String, node2: String, value: TruthValue },
    /// A 3-valued structure file must list every tuple explicitly.
    MissingFact { pred: String, tuple: Vec<String> },
    /// Two nodes share all definite unary predicate values.
    NotBounded { node1: String, node2: String },
    /// A nullary predicate with value 1/2 where a definite value is required.
    IndefiniteNullary { pred: String },
    /// A unary predicate with value 1/2 where a definite value is required.
    IndefiniteUnary { pred: String, node: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EqDiagonal { node, value } => {
                write!(f, "eq({node},{node}) = {value} breaks the equality rule")
            }
            Violation::EqOffDiagonal { node1, node2, value } => {
                write!(f, "eq({node1},{node2}) = {value}, must be 0 for distinct nodes")
            }
            Violation::MissingFact { pred, tuple } => {
                write!(f, "missing fact for {pred}({})", tuple.join(","))
            }
            Violation::NotBounded { node1, node2 } => {
                write!(f, "nodes {node1} and {node2} share all definite unary values")
            }
            Violation::IndefiniteNullary { pred } => {
                write!(f, "nullary predicate {pred} has value 1/2")
            }
            Violation::IndefiniteUnary { pred, node } => {
                write!(f, "unary predicate {pred} has value 1/2 on {node}")
            }
        }
    }
}

fn check_nodes(node_ids: &[String]) -> Result<(), Error> {
    let mut seen = HashSet::new();
    for id in node_ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateNode { id: id.clone() });
        }
    }
    Ok(())
}

/// A finite classical model: total `{0,1}` interpretation of every predicate,
/// with `eq` interpreted as node identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoValuedStructure {
    voc: Vocabulary,
    universe: Vec<String>,
    tables: Vec<Vec<bool>>,
}

impl TwoValuedStructure {
    /// Creates a structure with all predicates false except the forced `eq`
    /// diagonal. The universe may be empty.
    pub fn new<S: Into<String>>(voc: &Vocabulary, node_ids: impl IntoIterator<Item = S>) -> Result<Self, Error> {
        let universe: Vec<String> = node_ids.into_iter().map(Into::into).collect();
        check_nodes(&universe)?;
        let n = universe.len();
        let mut tables: Vec<Vec<bool>> =
            (0..voc.len()).map(|p| vec![false; table_len(n, voc.arity(p))]).collect();
        for u in 0..n {
            tables[voc.eq_index()][tuple_index(n, &[u, u])] = true;
        }
        Ok(TwoValuedStructure { voc: voc.clone(), universe, tables })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.voc
    }

    pub fn node_ids(&self) -> &[String] {
        &self.universe
    }

    pub fn node_count(&self) -> usize {
        self.universe.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.universe.iter().position(|n| n == id)
    }

    pub fn get(&self, pred: usize, tuple: &[usize]) -> bool {
        self.tables[pred][tuple_index(self.universe.len(), tuple)]
    }

    pub fn set(&mut self, pred: usize, tuple: &[usize], value: bool) {
        let idx = tuple_index(self.universe.len(), tuple);
        self.tables[pred][idx] = value;
    }

    /// Sets a fact by predicate and node names.
    pub fn set_named(&mut self, pred: &str, nodes: &[&str], value: bool) -> Result<(), Error> {
        let p = self
            .voc
            .pred_index(pred)
            .ok_or_else(|| Error::UnknownPredicate { name: pred.to_string() })?;
        if self.voc.arity(p) != nodes.len() {
            return Err(Error::ArityMismatch {
                name: pred.to_string(),
                expected: self.voc.arity(p),
                got: nodes.len(),
            });
        }
        let mut tuple = Vec::with_capacity(nodes.len());
        for id in nodes {
            tuple.push(self.node_index(id).ok_or_else(|| Error::UnknownNode { id: id.to_string() })?);
        }
        self.set(p, &tuple, value);
        Ok(())
    }

    pub(crate) fn raw_table(&self, pred: usize) -> &[bool] {
        &self.tables[pred]
    }

    pub(crate) fn raw_table_mut(&mut self, pred: usize) -> &mut Vec<bool> {
        &mut self.tables[pred]
    }

    /// Checks the 2-valued invariants; an empty result means the structure
    /// is well formed. Empty universes are legal.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.universe.len();
        let eq = self.voc.eq_index();
        for u in 0..n {
            for v in 0..n {
                let val = self.get(eq, &[u, v]);
                if u == v && !val {
                    out.push(Violation::EqDiagonal {
                        node: self.universe[u].clone(),
                        value: TruthValue::False,
                    });
                } else if u != v && val {
                    out.push(Violation::EqOffDiagonal {
                        node1: self.universe[u].clone(),
                        node2: self.universe[v].clone(),
                        value: TruthValue::True,
                    });
                }
            }
        }
        out
    }

    /// The same structure with every value viewed as a definite truth value.
    pub fn to_three_valued(&self) -> ThreeValuedStructure {
        let mut s = ThreeValuedStructure::new(&self.voc, self.universe.clone())
            .expect("node ids already checked");
        for (p, table) in self.tables.iter().enumerate() {
            for (i, &b) in table.iter().enumerate() {
                s.tables[p][i] = TruthValue::from_bool(b);
            }
        }
        s
    }

    pub fn to_file_text(&self) -> String {
        file::write_two(self)
    }
}

impl Structure for TwoValuedStructure {
    fn vocabulary(&self) -> &Vocabulary {
        &self.voc
    }

    fn node_ids(&self) -> &[String] {
        &self.universe
    }

    fn truth(&self, pred: usize, tuple: &[usize]) -> TruthValue {
        TruthValue::from_bool(self.get(pred, tuple))
    }
}

/// A 3-valued structure: values range over `{0, 1, 1/2}`, the `eq` diagonal
/// is 1 or 1/2 (nodes with `eq(u,u) = 1/2` are summary nodes), and `eq` is 0
/// off the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeValuedStructure {
    voc: Vocabulary,
    universe: Vec<String>,
    tables: Vec<Vec<TruthValue>>,
}

impl ThreeValuedStructure {
    /// Creates a structure with every predicate 0 and all nodes non-summary.
    pub fn new<S: Into<String>>(voc: &Vocabulary, node_ids: impl IntoIterator<Item = S>) -> Result<Self, Error> {
        let universe: Vec<String> = node_ids.into_iter().map(Into::into).collect();
        check_nodes(&universe)?;
        let n = universe.len();
        let mut tables: Vec<Vec<TruthValue>> = (0..voc.len())
            .map(|p| vec![TruthValue::False; table_len(n, voc.arity(p))])
            .collect();
        for u in 0..n {
            tables[voc.eq_index()][tuple_index(n, &[u, u])] = TruthValue::True;
        }
        Ok(ThreeValuedStructure { voc: voc.clone(), universe, tables })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.voc
    }

    pub fn node_ids(&self) -> &[String] {
        &self.universe
    }

    pub fn node_count(&self) -> usize {
        self.universe.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.universe.iter().position(|n| n == id)
    }

    pub fn get(&self, pred: usize, tuple: &[usize]) -> TruthValue {
        self.tables[pred][tuple_index(self.universe.len(), tuple)]
    }

    pub fn set(&mut self, pred: usize, tuple: &[usize], value: TruthValue) {
        let idx = tuple_index(self.universe.len(), tuple);
        self.tables[pred][idx] = value;
    }

    pub fn set_named(&mut self, pred: &str, nodes: &[&str], value: TruthValue) -> Result<(), Error> {
        let p = self
            .voc
            .pred_index(pred)
            .ok_or_else(|| Error::UnknownPredicate { name: pred.to_string() })?;
        if self.voc.arity(p) != nodes.len() {
            return Err(Error::ArityMismatch {
                name: pred.to_string(),
                expected: self.voc.arity(p),
                got: nodes.len(),
            });
        }
        let mut tuple = Vec::with_capacity(nodes.len());
        for id in nodes {
            tuple.push(self.node_index(id).ok_or_else(|| Error::UnknownNode { id: id.to_string() })?);
        }
        self.set(p, &tuple, value);
        Ok(())
    }

    /// Marks a node as a summary node (`eq(u,u) = 1/2`).
    pub fn mark_summary(&mut self, id: &str) -> Result<(), Error> {
        let u = self.node_index(id).ok_or_else(|| Error::UnknownNode { id: id.to_string() })?;
        let eq = self.voc.eq_index();
        self.set(eq, &[u, u], TruthValue::Unknown);
        Ok(())
    }

    pub fn is_summary(&self, node: usize) -> bool {
        self.get(self.voc.eq_index(), &[node, node]) == TruthValue::Unknown
    }

    /// Checks the 3-valued equality invariants.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.universe.len();
        let eq = self.voc.eq_index();
        for u in 0..n {
            for v in 0..n {
                let val = self.get(eq, &[u, v]);
                if u == v && val == TruthValue::False {
                    out.push(Violation::EqDiagonal { node: self.universe[u].clone(), value: val });
                } else if u != v && val != TruthValue::False {
                    out.push(Violation::EqOffDiagonal {
                        node1: self.universe[u].clone(),
                        node2: self.universe[v].clone(),
                        value: val,
                    });
                }
            }
        }
        out
    }

    pub fn to_file_text(&self) -> String {
        file::write_three(self)
    }
}

impl Structure for ThreeValuedStructure {
    fn vocabulary(&self) -> &Vocabulary {
        &self.voc
    }

    fn node_ids(&self) -> &[String] {
        &self.universe
    }

    fn truth(&self, pred: usize, tuple: &[usize]) -> TruthValue {
        self.get(pred, tuple)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use TruthValue::{False, True, Unknown};

    #[test]
    fn join_is_least_upper_bound() {
        assert_eq!(False.join(True), Unknown);
        assert_eq!(True.join(True), True);
        assert_eq!(False.join(Unknown), Unknown);
        assert_eq!(Unknown.join(Unknown), Unknown);
    }

    #[test]
    fn info_order_laws() {
        let all = [False, True, Unknown];
        for a in all {
            assert!(a.info_leq(a));
            for b in all {
                // join is the lub
                let j = a.join(b);
                assert!(a.info_leq(j) && b.info_leq(j));
                assert_eq!(a.join(b), b.join(a));
                for c in all {
                    assert_eq!(a.join(b).join(c), a.join(b.join(c)));
                    // antisymmetry
                    if a.info_leq(b) && b.info_leq(a) {
                        assert_eq!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn kleene_connectives() {
        assert_eq!(True.kleene_and(Unknown), Unknown);
        assert_eq!(False.kleene_and(Unknown), False);
        assert_eq!(True.kleene_or(Unknown), True);
        assert_eq!(False.kleene_or(Unknown), Unknown);
        assert_eq!(Unknown.kleene_not(), Unknown);
    }

    fn voc() -> Vocabulary {
        Vocabulary::new([("x", 1), ("n", 2)]).unwrap()
    }

    #[test]
    fn two_valued_eq_is_forced() {
        let s = TwoValuedStructure::new(&voc(), ["u1", "u2"]).unwrap();
        let eq = s.vocabulary().eq_index();
        assert!(s.get(eq, &[0, 0]));
        assert!(!s.get(eq, &[0, 1]));
        assert!(s.validate().is_empty());
    }

    #[test]
    fn two_valued_eq_violation() {
        let v = voc();
        let mut s = TwoValuedStructure::new(&v, ["u1", "u2"]).unwrap();
        s.set(v.eq_index(), &[0, 1], true);
        let violations = s.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::EqOffDiagonal { .. }));
    }

    #[test]
    fn three_valued_summary_and_validation() {
        let v = voc();
        let mut s = ThreeValuedStructure::new(&v, ["u1", "u2"]).unwrap();
        s.mark_summary("u2").unwrap();
        assert!(!s.is_summary(0));
        assert!(s.is_summary(1));
        assert!(s.validate().is_empty());

        s.set(v.eq_index(), &[0, 0], TruthValue::False);
        let violations = s.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::EqDiagonal { .. }));
    }

    #[test]
    fn duplicate_nodes_rejected() {
        assert!(TwoValuedStructure::new(&voc(), ["u", "u"]).is_err());
    }
}

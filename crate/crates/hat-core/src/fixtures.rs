//! Programmatic builders for the structures used by tests and CLI demos:
//! concrete linked lists, the two-node list abstraction with a summary
//! tail, the focused variant of it, the 3-colorability abstraction, and
//! the five structures arising at the head of the insert loop.
//!
//! Drawing conventions: values not mentioned are 0, definite edges are 1,
//! indefinite edges are 1/2, and summary nodes have `eq(u,u) = 1/2`.

use crate::error::Error;
use crate::logic::Vocabulary;
use crate::structures::{StructureFile, ThreeValuedStructure, TruthValue, TwoValuedStructure};

/// Pointer variables of the running list example.
pub const LIST_PVAR: [&str; 4] = ["x", "y", "t", "e"];

/// Vocabulary for list-manipulating programs: one unary predicate per
/// pointer variable, a reachability predicate per pointer variable, the
/// sharing predicate `is` (optional), and the binary link predicate `n`.
pub fn list_vocabulary(pvar: &[&str], with_is: bool) -> Vocabulary {
    let mut preds: Vec<(String, usize)> = Vec::new();
    for q in pvar {
        preds.push((q.to_string(), 1));
    }
    for q in pvar {
        preds.push((format!("r_{q}"), 1));
    }
    if with_is {
        preds.push(("is".to_string(), 1));
    }
    preds.push(("n".to_string(), 2));
    Vocabulary::new(preds).expect("list vocabulary is well formed")
}

/// The full vocabulary of the running example: `x, y, t, e`, their
/// reachability predicates, `is`, and `n`.
pub fn full_list_vocabulary() -> Vocabulary {
    list_vocabulary(&LIST_PVAR, true)
}

/// The reduced vocabulary `{eq, x, r_x, n}` used by the desk-scale oracle
/// comparisons.
pub fn reduced_list_vocabulary() -> Vocabulary {
    list_vocabulary(&["x"], false)
}

fn set_if_present(s: &mut TwoValuedStructure, pred: &str, nodes: &[&str]) {
    if s.vocabulary().contains(pred) {
        s.set_named(pred, nodes, true).expect("fixture fact");
    }
}

/// An acyclic `k`-node list pointed to by `x`, with every derived
/// predicate (reachability, sharing) consistent with the links.
pub fn list_chain(voc: &Vocabulary, k: usize) -> TwoValuedStructure {
    let ids: Vec<String> = (1..=k).map(|i| format!("u{i}")).collect();
    let mut s = TwoValuedStructure::new(voc, ids.clone()).expect("fresh node ids");
    if k == 0 {
        return s;
    }
    set_if_present(&mut s, "x", &[&ids[0]]);
    for i in 0..k - 1 {
        s.set_named("n", &[&ids[i], &ids[i + 1]], true).expect("chain edge");
    }
    for id in &ids {
        set_if_present(&mut s, "r_x", &[id]);
    }
    s
}

/// A `k`-node cyclic list pointed to by `x` (the last node links back to
/// the first). Every node still has exactly one predecessor, so `is` stays
/// 0 everywhere and the integrity formula holds.
pub fn list_cycle(voc: &Vocabulary, k: usize) -> TwoValuedStructure {
    let mut s = list_chain(voc, k);
    if k > 0 {
        let last = format!("u{k}");
        s.set_named("n", &[&last, "u1"], true).expect("closing edge");
    }
    s
}

/// The two-node abstraction of all lists pointed to by `x` with at least
/// two elements: a head `u1` and a summary tail `u2`, with indefinite
/// links `n(u1,u2)` and `n(u2,u2)`.
pub fn list_abstraction(voc: &Vocabulary) -> ThreeValuedStructure {
    let mut s = ThreeValuedStructure::new(voc, ["u1", "u2"]).expect("fresh node ids");
    s.mark_summary("u2").expect("u2 exists");
    s.set_named("x", &["u1"], TruthValue::True).expect("x");
    s.set_named("r_x", &["u1"], TruthValue::True).expect("r_x");
    s.set_named("r_x", &["u2"], TruthValue::True).expect("r_x");
    s.set_named("n", &["u1", "u2"], TruthValue::Unknown).expect("n");
    s.set_named("n", &["u2", "u2"], TruthValue::Unknown).expect("n");
    s
}

/// The focused variant of [`list_abstraction`]: the head's successor is
/// materialized as a separate non-summary node `u2` with a definite
/// `n(u1,u2) = 1` edge, followed by a summary tail `u3`. Nodes `u2` and
/// `u3` carry identical unary values, so this structure is not bounded.
pub fn focused_list_abstraction(voc: &Vocabulary) -> ThreeValuedStructure {
    let mut s = ThreeValuedStructure::new(voc, ["u1", "u2", "u3"]).expect("fresh node ids");
    s.mark_summary("u3").expect("u3 exists");
    s.set_named("x", &["u1"], TruthValue::True).expect("x");
    for id in ["u1", "u2", "u3"] {
        s.set_named("r_x", &[id], TruthValue::True).expect("r_x");
    }
    s.set_named("n", &["u1", "u2"], TruthValue::True).expect("n");
    s.set_named("n", &["u2", "u3"], TruthValue::Unknown).expect("n");
    s.set_named("n", &["u3", "u3"], TruthValue::Unknown).expect("n");
    s
}

/// Vocabulary for undirected graphs: `f` and `b` give the forward and
/// backward directions of each edge.
pub fn graph_vocabulary() -> Vocabulary {
    Vocabulary::new([("f", 2), ("b", 2)]).expect("graph vocabulary")
}

/// The three-summary-node structure whose concretizations are exactly the
/// 3-colorable undirected graphs: every cross pair of color classes is
/// indefinite and self loops are absent.
pub fn color3() -> ThreeValuedStructure {
    let voc = graph_vocabulary();
    let mut s = ThreeValuedStructure::new(&voc, ["u1", "u2", "u3"]).expect("fresh node ids");
    for id in ["u1", "u2", "u3"] {
        s.mark_summary(id).expect("node exists");
    }
    let f = voc.pred_index("f").unwrap();
    let b = voc.pred_index("b").unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                s.set(f, &[i, j], TruthValue::Unknown);
                s.set(b, &[i, j], TruthValue::Unknown);
            }
        }
    }
    s
}

/// A simple undirected graph over `k` nodes in the `f`/`b` encoding.
/// Both predicates are kept symmetric; self loops are rejected.
pub fn undirected_graph(k: usize, edges: &[(usize, usize)]) -> TwoValuedStructure {
    let voc = graph_vocabulary();
    let ids: Vec<String> = (1..=k).map(|i| format!("u{i}")).collect();
    let mut s = TwoValuedStructure::new(&voc, ids).expect("fresh node ids");
    let f = voc.pred_index("f").unwrap();
    let b = voc.pred_index("b").unwrap();
    for &(i, j) in edges {
        assert!(i != j, "simple graphs have no self loops");
        assert!(i < k && j < k, "edge endpoint out of range");
        for (p, q) in [(i, j), (j, i)] {
            s.set(f, &[p, q], true);
            s.set(b, &[p, q], true);
        }
    }
    s
}

/// The complete graph on `k` nodes.
pub fn clique(k: usize) -> TwoValuedStructure {
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            edges.push((i, j));
        }
    }
    undirected_graph(k, &edges)
}

struct AbstractSpec {
    nodes: &'static [&'static str],
    summaries: &'static [&'static str],
    unaries: &'static [(&'static str, &'static [&'static str])],
    definite_edges: &'static [(&'static str, &'static str)],
    unknown_edges: &'static [(&'static str, &'static str)],
}

fn build_abstract(voc: &Vocabulary, spec: &AbstractSpec) -> ThreeValuedStructure {
    let mut s = ThreeValuedStructure::new(voc, spec.nodes.iter().copied()).expect("fresh node ids");
    for id in spec.summaries {
        s.mark_summary(id).expect("summary node exists");
    }
    for (pred, nodes) in spec.unaries {
        for id in *nodes {
            s.set_named(pred, &[id], TruthValue::True).expect("unary fact");
        }
    }
    for (a, b) in spec.definite_edges {
        s.set_named("n", &[a, b], TruthValue::True).expect("edge fact");
    }
    for (a, b) in spec.unknown_edges {
        s.set_named("n", &[a, b], TruthValue::Unknown).expect("edge fact");
    }
    s
}

/// The five structures that arise at the beginning of the insert loop, in
/// order. They are built over the full list vocabulary.
pub fn loop_invariant_structures(voc: &Vocabulary) -> Vec<ThreeValuedStructure> {
    const SPECS: [AbstractSpec; 5] = [
        // y still at the head.
        AbstractSpec {
            nodes: &["u1", "u2"],
            summaries: &["u2"],
            unaries: &[
                ("x", &["u1"]),
                ("y", &["u1"]),
                ("r_x", &["u1", "u2"]),
                ("r_y", &["u1", "u2"]),
            ],
            definite_edges: &[],
            unknown_edges: &[("u1", "u2"), ("u2", "u2")],
        },
        // y on the last node of a two-node list.
        AbstractSpec {
            nodes: &["u1", "u2"],
            summaries: &[],
            unaries: &[("x", &["u1"]), ("y", &["u2"]), ("r_x", &["u1", "u2"]), ("r_y", &["u2"])],
            definite_edges: &[("u1", "u2")],
            unknown_edges: &[],
        },
        // y one step in, summary tail beyond it.
        AbstractSpec {
            nodes: &["u1", "u2", "u3"],
            summaries: &["u3"],
            unaries: &[
                ("x", &["u1"]),
                ("y", &["u2"]),
                ("r_x", &["u1", "u2", "u3"]),
                ("r_y", &["u2", "u3"]),
            ],
            definite_edges: &[("u1", "u2")],
            unknown_edges: &[("u2", "u3"), ("u3", "u3")],
        },
        // y in the middle, summaries on both sides.
        AbstractSpec {
            nodes: &["u1", "u2", "u3", "u4"],
            summaries: &["u2", "u4"],
            unaries: &[
                ("x", &["u1"]),
                ("y", &["u3"]),
                ("r_x", &["u1", "u2", "u3", "u4"]),
                ("r_y", &["u3", "u4"]),
            ],
            definite_edges: &[],
            unknown_edges: &[("u1", "u2"), ("u2", "u2"), ("u2", "u3"), ("u3", "u4"), ("u4", "u4")],
        },
        // y on the last node.
        AbstractSpec {
            nodes: &["u1", "u2", "u3"],
            summaries: &["u2"],
            unaries: &[
                ("x", &["u1"]),
                ("y", &["u3"]),
                ("r_x", &["u1", "u2", "u3"]),
                ("r_y", &["u3"]),
            ],
            definite_edges: &[],
            unknown_edges: &[("u1", "u2"), ("u2", "u2"), ("u2", "u3")],
        },
    ];
    SPECS.iter().map(|spec| build_abstract(voc, spec)).collect()
}

/// Builds a named fixture. `k` parameterizes the chain, cycle and clique
/// families and is ignored otherwise.
pub fn build(name: &str, k: Option<usize>) -> Result<StructureFile, Error> {
    let full = full_list_vocabulary();
    let fixture = match name {
        "list2" => StructureFile::Two(list_chain(&full, 2)),
        "list3" => StructureFile::Two(list_chain(&full, 3)),
        "list4" => StructureFile::Two(list_chain(&full, 4)),
        "list_abs" => StructureFile::Three(list_abstraction(&full)),
        "list_abs_focus" => StructureFile::Three(focused_list_abstraction(&full)),
        "list_abs_reduced" => StructureFile::Three(list_abstraction(&reduced_list_vocabulary())),
        "color3" => StructureFile::Three(color3()),
        "loop1" | "loop2" | "loop3" | "loop4" | "loop5" => {
            let idx = name.as_bytes()[4] - b'1';
            StructureFile::Three(loop_invariant_structures(&full).swap_remove(idx as usize))
        }
        "chain" => StructureFile::Two(list_chain(&full, k.unwrap_or(4))),
        "cycle" => StructureFile::Two(list_cycle(&full, k.unwrap_or(2))),
        "clique" => StructureFile::Two(clique(k.unwrap_or(4))),
        _ => return Err(Error::UnknownFixture { name: name.to_string() }),
    };
    Ok(fixture)
}

/// Names accepted by [`build`].
pub fn fixture_names() -> Vec<&'static str> {
    vec![
        "list2",
        "list3",
        "list4",
        "list_abs",
        "list_abs_focus",
        "list_abs_reduced",
        "color3",
        "loop1",
        "loop2",
        "loop3",
        "loop4",
        "loop5",
        "chain",
        "cycle",
        "clique",
    ]
}

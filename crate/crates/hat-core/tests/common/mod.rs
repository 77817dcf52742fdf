//! Helpers shared by the integration test suites: a generator for random
//! formulas over a small fixed vocabulary, exhaustive enumeration of
//! 3-valued structures, and a brute-force coloring oracle.

// Each test target compiles this module separately and uses its own subset.
#![allow(dead_code)]

use hat_core::structures::{table_len, ThreeValuedStructure};
use hat_core::{Formula, TruthValue, Vocabulary};
use proptest::prelude::*;

/// Vocabulary used by the generated-formula suites:
/// a nullary, two unary and one binary predicate besides `eq`.
pub fn test_vocabulary() -> Vocabulary {
    Vocabulary::new([("a0", 0), ("p", 1), ("q", 1), ("n", 2)]).unwrap()
}

fn var() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["v", "v1", "v2", "w", "w1"]).prop_map(str::to_string)
}

fn set_var() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["V", "V1", "V2"]).prop_map(str::to_string)
}

fn leaf(allow_sets: bool) -> BoxedStrategy<Formula> {
    let mut options: Vec<BoxedStrategy<Formula>> = vec![
        Just(Formula::False).boxed(),
        Just(Formula::True).boxed(),
        Just(Formula::Atom("a0".into(), vec![])).boxed(),
        var().prop_map(|v| Formula::Atom("p".into(), vec![v])).boxed(),
        var().prop_map(|v| Formula::Atom("q".into(), vec![v])).boxed(),
        (var(), var()).prop_map(|(a, b)| Formula::Atom("n".into(), vec![a, b])).boxed(),
        (var(), var()).prop_map(|(a, b)| Formula::Atom("eq".into(), vec![a, b])).boxed(),
    ];
    if allow_sets {
        options.push((var(), set_var()).prop_map(|(v, sv)| Formula::SetMember(v, sv)).boxed());
    }
    proptest::strategy::Union::new(options).boxed()
}

/// Random well-formed formulas over [`test_vocabulary`]. With `allow_sets`
/// the NP constructs are generated as well.
pub fn formula_strategy(allow_sets: bool) -> BoxedStrategy<Formula> {
    leaf(allow_sets)
        .prop_recursive(5, 48, 4, move |inner| {
            let mut options: Vec<BoxedStrategy<Formula>> = vec![
                inner.clone().prop_map(Formula::not).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)).boxed(),
                (var(), inner.clone()).prop_map(|(v, f)| Formula::exists(v, f)).boxed(),
                (var(), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)).boxed(),
                (var(), var()).prop_map(|(a, b)| Formula::tc_plus("n", a, b)).boxed(),
                (var(), var()).prop_map(|(a, b)| Formula::tc_star("n", a, b)).boxed(),
                (var(), var(), inner.clone(), var(), var())
                    .prop_map(|(b1, b2, f, a1, a2)| Formula::Tc {
                        bound: (b1, b2),
                        body: Box::new(f),
                        args: (a1, a2),
                    })
                    .boxed(),
            ];
            if allow_sets {
                options.push(
                    (prop::collection::vec(set_var(), 1..3), inner)
                        .prop_map(|(svs, f)| Formula::ExistsSets(svs, Box::new(f)))
                        .boxed(),
                );
            }
            proptest::strategy::Union::new(options).boxed()
        })
        .boxed()
}

/// Closes a formula by existentially quantifying its free variables.
pub fn close(f: Formula) -> Formula {
    let free: Vec<String> = f.free_variables().into_iter().collect();
    Formula::exists_all(free, f)
}

/// Every 3-valued structure over `voc` with exactly `k` nodes: all summary
/// flags times all value tables for the non-eq predicates.
pub fn all_three_valued(voc: &Vocabulary, k: usize) -> Vec<ThreeValuedStructure> {
    let ids: Vec<String> = (1..=k).map(|i| format!("u{i}")).collect();
    let preds: Vec<(usize, usize)> = voc
        .decls()
        .filter(|(p, _)| *p != voc.eq_index())
        .map(|(p, d)| (p, table_len(k, d.arity)))
        .collect();
    let total_cells: usize = preds.iter().map(|(_, len)| len).sum();
    let mut out = Vec::new();
    let values = [TruthValue::False, TruthValue::True, TruthValue::Unknown];
    let combos = 3usize.pow(total_cells as u32);
    for summary_mask in 0..(1usize << k) {
        for mut code in 0..combos {
            let mut s = ThreeValuedStructure::new(voc, ids.clone()).unwrap();
            for (u, id) in ids.iter().enumerate() {
                if summary_mask >> u & 1 == 1 {
                    s.mark_summary(id).unwrap();
                }
            }
            let mut tuple = Vec::new();
            for &(p, len) in &preds {
                for idx in 0..len {
                    hat_core::structures::decode_tuple(k, voc.arity(p), idx, &mut tuple);
                    s.set(p, &tuple, values[code % 3]);
                    code /= 3;
                }
            }
            out.push(s);
        }
    }
    out
}

/// Proper coloring with at most `colors` colors.
pub fn colorable(k: usize, edges: &[(usize, usize)], colors: usize) -> bool {
    try_colorings(k, edges, colors, false)
}

/// Proper coloring using every one of the `colors` classes at least once.
pub fn surjectively_colorable(k: usize, edges: &[(usize, usize)], colors: usize) -> bool {
    try_colorings(k, edges, colors, true)
}

fn try_colorings(k: usize, edges: &[(usize, usize)], colors: usize, onto: bool) -> bool {
    let total = colors.pow(k as u32);
    'outer: for mut code in 0..total {
        let mut assign = vec![0usize; k];
        for slot in assign.iter_mut() {
            *slot = code % colors;
            code /= colors;
        }
        for &(a, b) in edges {
            if assign[a] == assign[b] {
                continue 'outer;
            }
        }
        if onto && (0..colors).any(|c| !assign.contains(&c)) {
            continue 'outer;
        }
        return true;
    }
    false
}

/// All index pairs `(i, j)` with `i < j < k`: the potential edges of a
/// simple graph on `k` nodes.
pub fn edge_slots(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            out.push((i, j));
        }
    }
    out
}

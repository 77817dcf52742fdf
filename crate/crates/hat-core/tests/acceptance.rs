//! Acceptance suite. Each test exercises one headline guarantee at desk
//! scale, asserts it exactly, and prints a `criterion N: PASS` line
//! (visible with `--nocapture`). The bound-4 variant of the first check is
//! expensive and runs only with `cargo test -- --ignored`.

mod common;

use common::{
    colorable, edge_slots, formula_strategy, surjectively_colorable, test_vocabulary,
};
use hat_core::abstraction::{
    canonical_abstraction, find_embedding, ica_isomorphic, in_gamma, in_gamma_c,
};
use hat_core::charform::{
    characteristic_formula, gamma_hat, gamma_hat_c, gamma_hat_np, list_integrity_formula,
    list_x_queries, tau_formula, NodeFormulaMap,
};
use hat_core::fixtures::{
    color3, full_list_vocabulary, list_abstraction, list_chain, loop_invariant_structures,
    reduced_list_vocabulary, undirected_graph, LIST_PVAR,
};
use hat_core::semantics::{eval2_closed, eval3_closed, Evaluator};
use hat_core::supervaluation::{supervaluate, QueryBounds};
use hat_core::{
    enumerate_structures, parse_formula, print_formula, Assignment, Formula, ThreeValuedStructure,
    TruthValue, TwoValuedStructure, Vocabulary,
};

/// Exhaustive agreement of semantic membership (embedding plus integrity)
/// with satisfaction of the characteristic formula, over the reduced list
/// vocabulary.
fn membership_agreement_up_to(max_nodes: usize) -> (usize, usize) {
    let voc = reduced_list_vocabulary();
    let s = list_abstraction(&voc);
    let integrity = list_integrity_formula(&voc, &["x"]).unwrap();
    let nodes = NodeFormulaMap::bounded(&s).unwrap();
    let gamma = gamma_hat(std::slice::from_ref(&s), &[nodes], &integrity).unwrap();

    let mut evaluator = Evaluator::new();
    let mut total = 0usize;
    let mut members = 0usize;
    for structure in enumerate_structures(&voc, max_nodes, None).unwrap() {
        let structure = structure.unwrap();
        let semantic = in_gamma(&structure, &s, &integrity).unwrap();
        let syntactic = evaluator.eval_closed(&structure, &gamma).unwrap();
        assert_eq!(
            semantic, syntactic,
            "membership and formula satisfaction disagree on:\n{}",
            structure.to_file_text()
        );
        total += 1;
        members += usize::from(semantic);
    }
    (total, members)
}

#[test]
fn criterion_1_characteristic_formula_matches_membership() {
    let (total, members) = membership_agreement_up_to(3);
    assert_eq!(total, 1 + 8 + 256 + 32_768);
    assert!(members > 0, "the concretization has members below the bound");
    println!("criterion 1 (characteristic formula = embedding membership, bound 3): PASS ({total} structures, {members} members)");
}

#[test]
#[ignore = "bound-4 sweep of 16.8M structures; run with --ignored"]
fn criterion_1_characteristic_formula_matches_membership_slow() {
    let (total, members) = membership_agreement_up_to(4);
    assert_eq!(total, 1 + 8 + 256 + 32_768 + 16_777_216);
    println!("criterion 1 slow (bound 4): PASS ({total} structures, {members} members)");
}

#[test]
fn criterion_2_tight_formula_matches_canonical_membership() {
    let voc = reduced_list_vocabulary();
    let s = list_abstraction(&voc);
    let integrity = list_integrity_formula(&voc, &["x"]).unwrap();
    let gamma_c = gamma_hat_c(std::slice::from_ref(&s), &integrity).unwrap();

    let mut evaluator = Evaluator::new();
    let mut members = 0usize;
    for structure in enumerate_structures(&voc, 3, None).unwrap() {
        let structure = structure.unwrap();
        let semantic = in_gamma_c(&structure, &s, &integrity).unwrap();
        let syntactic = evaluator.eval_closed(&structure, &gamma_c).unwrap();
        assert_eq!(
            semantic, syntactic,
            "canonical membership and tight formula disagree on:\n{}",
            structure.to_file_text()
        );
        members += usize::from(semantic);
    }
    assert!(members > 0);

    // The two-node list is admissible yet represented only under plain
    // embedding, never under canonical abstraction; longer lists are.
    for (k, expected) in [(2usize, false), (3, true), (4, true)] {
        let chain = list_chain(&voc, k);
        assert_eq!(in_gamma_c(&chain, &s, &integrity).unwrap(), expected, "chain {k}");
        assert_eq!(eval2_closed(&chain, &gamma_c).unwrap(), expected, "chain {k} via formula");
        assert!(in_gamma(&chain, &s, &integrity).unwrap(), "chain {k} embeds");
    }
    println!("criterion 2 (tight characteristic formula = canonical-abstraction membership): PASS");
}

#[test]
fn criterion_3_np_formula_embedding_and_colorability_coincide() {
    let abstraction = color3();
    let np = gamma_hat_np(std::slice::from_ref(&abstraction), &Formula::True).unwrap();
    let mut evaluator = Evaluator::new();
    let mut graphs = 0usize;
    let mut colorable_count = 0usize;
    for k in 0..=5usize {
        let slots = edge_slots(k);
        for mask in 0u32..1 << slots.len() {
            let edges: Vec<(usize, usize)> = slots
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let graph = undirected_graph(k, &edges);
            let by_formula = evaluator.eval_closed(&graph, &np).unwrap();
            let by_embedding = find_embedding(&graph, &abstraction).unwrap().is_some();
            let by_search = surjectively_colorable(k, &edges, 3);
            assert_eq!(by_formula, by_embedding, "k={k} mask={mask:b}");
            assert_eq!(by_embedding, by_search, "k={k} mask={mask:b}");
            if k >= 3 {
                // With at least as many nodes as colors, a proper coloring
                // can always be rebalanced to inhabit all three classes.
                assert_eq!(colorable(k, &edges, 3), by_search, "k={k} mask={mask:b}");
            }
            graphs += 1;
            colorable_count += usize::from(by_search);
        }
    }
    assert_eq!(graphs, 1 + 1 + 2 + 8 + 64 + 1024);
    println!("criterion 3 (NP formula = embedding = 3-colorability, {graphs} graphs, {colorable_count} colorable): PASS");
}

#[test]
fn criterion_4_supervaluation_is_strictly_more_precise_than_kleene() {
    let voc = full_list_vocabulary();
    let s = list_abstraction(&voc);
    let integrity = list_integrity_formula(&voc, &LIST_PVAR).unwrap();
    let bounds = QueryBounds::nodes(4);

    let pointer_advances = parse_formula("E v1,v2: x(v1) & n(v1,v2)", &voc).unwrap();
    // The compositional semantics cannot decide the query...
    assert_eq!(eval3_closed(&s, &pointer_advances).unwrap(), TruthValue::Unknown);
    // ...but every represented store satisfies it.
    let verdict =
        supervaluate(&pointer_advances, std::slice::from_ref(&s), &integrity, &bounds).unwrap();
    assert_eq!(verdict.value, TruthValue::True);
    assert_eq!(verdict.max_nodes, 4);

    // Every finite represented list has a last element.
    let has_last = parse_formula("E v1: A v2: !n(v1,v2)", &voc).unwrap();
    let verdict = supervaluate(&has_last, &[s], &integrity, &bounds).unwrap();
    assert_eq!(verdict.value, TruthValue::True);

    println!("criterion 4 (supervaluation definite where Kleene is 1/2, bound 4): PASS");
}

#[test]
fn criterion_5_loop_invariant_reproduction() {
    let voc = full_list_vocabulary();
    let structures = loop_invariant_structures(&voc);
    let integrity = list_integrity_formula(&voc, &LIST_PVAR).unwrap();
    let queries = list_x_queries(&voc).unwrap();
    let bounds = QueryBounds::nodes(4);

    let verdict = supervaluate(&queries.list, &structures, &integrity, &bounds).unwrap();
    assert_eq!(verdict.value, TruthValue::True, "x points to an acyclic unshared list");

    // A query that fails on some represented store gets a definite 0 when
    // it fails on all of them.
    let all_x = parse_formula("A v: x(v)", &voc).unwrap();
    let verdict = supervaluate(&all_x, &structures, &integrity, &bounds).unwrap();
    assert_eq!(verdict.value, TruthValue::False);

    println!("criterion 5 (loop invariant: list_x holds in all five structures, bound 4): PASS");
}

#[test]
fn criterion_6_negated_tight_formula_is_the_complement() {
    let voc = reduced_list_vocabulary();
    let s = list_abstraction(&voc);
    let integrity = list_integrity_formula(&voc, &["x"]).unwrap();
    let complement_formula =
        Formula::and(integrity.clone(), Formula::not(tau_formula(&s).unwrap()));

    let mut evaluator = Evaluator::new();
    let mut admissible = 0usize;
    let mut in_complement = 0usize;
    for structure in enumerate_structures(&voc, 3, Some(&integrity)).unwrap() {
        let structure = structure.unwrap();
        admissible += 1;
        let by_formula = evaluator.eval_closed(&structure, &complement_formula).unwrap();
        let (beta, _) = canonical_abstraction(&structure);
        let by_abstraction = !ica_isomorphic(&beta, &s).unwrap();
        assert_eq!(
            by_formula, by_abstraction,
            "complement disagreement on:\n{}",
            structure.to_file_text()
        );
        // Route through the complement membership operation as well.
        assert_eq!(
            hat_core::abstraction::in_ica_complement(&structure, &s, &integrity).unwrap(),
            by_formula
        );
        in_complement += usize::from(by_formula);
    }
    assert!(admissible > in_complement, "some admissible structures abstract to s");
    println!("criterion 6 (integrity & !tau = complement of canonical membership): PASS ({in_complement}/{admissible} admissible structures in the complement)");
}

#[test]
fn criterion_7_property_suites() {
    lattice_laws();
    round_trip_thousand();
    embedding_soundness_sweep();
    node_formula_uniqueness_on_fixtures();
    println!("criterion 7 (lattice laws, 1000 round trips, embedding soundness, node-formula uniqueness): PASS");
}

fn lattice_laws() {
    use TruthValue::{False, True, Unknown};
    let all = [False, True, Unknown];
    for a in all {
        assert!(a.info_leq(Unknown));
        assert!(a.info_leq(a));
        assert_eq!(a.join(a), a);
        for b in all {
            let j = a.join(b);
            assert!(a.info_leq(j) && b.info_leq(j));
            assert_eq!(j, b.join(a));
            // Least upper bound: nothing smaller dominates both.
            for c in all {
                if a.info_leq(c) && b.info_leq(c) {
                    assert!(j.info_leq(c));
                }
                assert_eq!(a.join(b).join(c), a.join(b.join(c)));
                // Monotone in each argument.
                if a.info_leq(b) {
                    assert!(a.join(c).info_leq(b.join(c)));
                }
            }
            if a.info_leq(b) && b.info_leq(a) {
                assert_eq!(a, b);
            }
        }
    }
}

fn round_trip_thousand() {
    use proptest::strategy::{Strategy, ValueTree};
    use proptest::test_runner::{Config, TestRunner};
    let mut runner = TestRunner::new(Config { cases: 1000, ..Config::default() });
    let voc = test_vocabulary();
    let strategy = formula_strategy(true);
    for _ in 0..1000 {
        let f = strategy.new_tree(&mut runner).unwrap().current();
        let printed = print_formula(&f);
        let reparsed = hat_core::parse_formula_np(&printed, &voc)
            .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
        assert_eq!(f, reparsed, "round trip changed `{printed}`");
    }
}

/// Whenever the Kleene value of a closed query is definite on an abstract
/// structure, every concrete structure embedded into it agrees; exhaustive
/// over two nodes and a two-predicate vocabulary.
fn embedding_soundness_sweep() {
    let voc = Vocabulary::new([("p", 1), ("r", 2)]).unwrap();
    let queries: Vec<Formula> = [
        "E v: p(v)",
        "A v: p(v)",
        "E v1,v2: r(v1,v2)",
        "A v1,v2: r(v1,v2) -> p(v2)",
        "E v: r(v,v) & p(v)",
        "E v1,v2: r+(v1,v2) & !eq(v1,v2)",
        "A v1,v2: r*(v1,v2)",
        "E v: p(v) & !(E w: r(v,w))",
    ]
    .iter()
    .map(|t| parse_formula(t, &voc).unwrap())
    .collect();

    let concretes: Vec<TwoValuedStructure> =
        enumerate_structures(&voc, 2, None).unwrap().collect::<Result<_, _>>().unwrap();

    let mut abstracts: Vec<ThreeValuedStructure> = Vec::new();
    for k in 0..=2 {
        abstracts.extend(common::all_three_valued(&voc, k));
    }
    assert_eq!(abstracts.len(), 1 + 2 * 3 * 3 + 4 * 9 * 81);

    let mut checked = 0usize;
    for abs in &abstracts {
        let kleene: Vec<TruthValue> =
            queries.iter().map(|q| eval3_closed(abs, q).unwrap()).collect();
        if kleene.iter().all(|v| !v.is_definite()) {
            continue;
        }
        for concrete in &concretes {
            if find_embedding(concrete, abs).unwrap().is_none() {
                continue;
            }
            for (q, &expected) in queries.iter().zip(&kleene) {
                if let Some(expected) = expected.as_bool() {
                    assert_eq!(
                        eval2_closed(concrete, q).unwrap(),
                        expected,
                        "definite Kleene value not preserved\nabstract: {abs:?}\nconcrete: {concrete:?}\nquery: {}",
                        print_formula(q)
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 10_000, "sweep too small: {checked}");
}

/// On every enumerated member of a bounded fixture's concretization, each
/// concrete node satisfies at most one node formula.
fn node_formula_uniqueness_on_fixtures() {
    // The reduced abstraction, checked up to four nodes.
    let voc = reduced_list_vocabulary();
    let integrity = list_integrity_formula(&voc, &["x"]).unwrap();
    check_uniqueness(&voc, &[list_abstraction(&voc)], &integrity, 4);

    // The five loop structures over the full vocabulary, up to three nodes.
    let voc = full_list_vocabulary();
    let integrity = list_integrity_formula(&voc, &LIST_PVAR).unwrap();
    let fixtures = loop_invariant_structures(&voc);
    check_uniqueness(&voc, &fixtures, &integrity, 3);
}

fn check_uniqueness(
    voc: &Vocabulary,
    fixtures: &[ThreeValuedStructure],
    integrity: &Formula,
    bound: usize,
) {
    let maps: Vec<NodeFormulaMap> =
        fixtures.iter().map(|s| NodeFormulaMap::bounded(s).unwrap()).collect();
    let gamma = gamma_hat(fixtures, &maps, integrity).unwrap();
    let mut members = 0usize;
    for member in enumerate_structures(voc, bound, Some(&gamma)).unwrap() {
        let member = member.unwrap();
        for (s, nodes) in fixtures.iter().zip(&maps) {
            if !in_gamma(&member, s, integrity).unwrap() {
                continue;
            }
            members += 1;
            for u in 0..member.node_count() {
                let hits = (0..nodes.len())
                    .filter(|&i| {
                        let f = nodes.instantiate(i, "w");
                        let z = Assignment::new().bind("w", u);
                        hat_core::eval2(&member, &f, &z).unwrap()
                    })
                    .count();
                assert!(
                    hits <= 1,
                    "concrete node {u} satisfies {hits} node formulas of a fixture"
                );
            }
        }
    }
    assert!(members > 0, "no members enumerated below bound {bound}");
}

/// Sanity anchor for the characteristic formula of a fully definite
/// structure: its models below the bound are exactly the isomorphic copies.
#[test]
fn definite_structure_formula_pins_its_isomorphs() {
    let voc = reduced_list_vocabulary();
    let two = list_chain(&voc, 2).to_three_valued();
    let nodes = NodeFormulaMap::bounded(&two).unwrap();
    let xi = characteristic_formula(&two, &nodes).unwrap();
    let mut models = 0usize;
    for structure in enumerate_structures(&voc, 3, None).unwrap() {
        let structure = structure.unwrap();
        if eval2_closed(&structure, &xi).unwrap() {
            models += 1;
            assert_eq!(structure.node_count(), 2);
            let (beta, _) = canonical_abstraction(&structure);
            assert!(ica_isomorphic(&beta, &two).unwrap());
        }
    }
    // Two labeled copies: the x-carrying head is node 1 or node 2.
    assert_eq!(models, 2);
}

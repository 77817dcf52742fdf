//! Benchmarks for the hot paths: formula parsing and printing, 2-valued
//! evaluation with transitive closure, embedding search, canonical
//! abstraction, filtered enumeration, and a full supervaluation query.

use criterion::{criterion_group, criterion_main, Criterion};
use hat_core::abstraction::{canonical_abstraction, find_embedding};
use hat_core::charform::{gamma_hat, list_integrity_formula, list_x_queries, NodeFormulaMap};
use hat_core::fixtures::{full_list_vocabulary, list_abstraction, list_chain, reduced_list_vocabulary};
use hat_core::semantics::eval2_closed;
use hat_core::structures::StructureStream;
use hat_core::supervaluation::{supervaluate, QueryBounds};
use hat_core::{parse_formula, print_formula};
use std::hint::black_box;

fn bench_parse_print(c: &mut Criterion) {
    let voc = full_list_vocabulary();
    let formula = list_integrity_formula(&voc, &["x", "y", "t", "e"]).unwrap();
    let text = print_formula(&formula);
    c.bench_function("parse_list_integrity", |b| {
        b.iter(|| parse_formula(black_box(&text), &voc).unwrap())
    });
    c.bench_function("print_list_integrity", |b| b.iter(|| print_formula(black_box(&formula))));
}

fn bench_eval(c: &mut Criterion) {
    let voc = full_list_vocabulary();
    let chain = list_chain(&voc, 6);
    let query = list_x_queries(&voc).unwrap().list;
    c.bench_function("eval2_list_query_chain6", |b| {
        b.iter(|| eval2_closed(black_box(&chain), black_box(&query)).unwrap())
    });
}

fn bench_embedding(c: &mut Criterion) {
    let voc = full_list_vocabulary();
    let abstraction = list_abstraction(&voc);
    let chain = list_chain(&voc, 8);
    c.bench_function("embed_chain8_into_summary", |b| {
        b.iter(|| find_embedding(black_box(&chain), black_box(&abstraction)).unwrap().unwrap())
    });
}

fn bench_abstraction(c: &mut Criterion) {
    let voc = full_list_vocabulary();
    let chain = list_chain(&voc, 6);
    c.bench_function("canonical_abstraction_chain6", |b| {
        b.iter(|| canonical_abstraction(black_box(&chain)))
    });
}

fn bench_enumeration(c: &mut Criterion) {
    let voc = reduced_list_vocabulary();
    let integrity = list_integrity_formula(&voc, &["x"]).unwrap();
    let s = list_abstraction(&voc);
    let nodes = NodeFormulaMap::bounded(&s).unwrap();
    let gamma = gamma_hat(std::slice::from_ref(&s), &[nodes], &integrity).unwrap();
    c.bench_function("enumerate_members_bound3", |b| {
        b.iter(|| {
            let stream = StructureStream::new(&voc, 3, Some(black_box(&gamma))).unwrap();
            stream.count()
        })
    });
}

fn bench_supervaluation(c: &mut Criterion) {
    let voc = reduced_list_vocabulary();
    let s = list_abstraction(&voc);
    let integrity = list_integrity_formula(&voc, &["x"]).unwrap();
    let query = parse_formula("E v1,v2: x(v1) & n(v1,v2)", &voc).unwrap();
    let bounds = QueryBounds::nodes(3);
    c.bench_function("supervaluate_pointer_query_bound3", |b| {
        b.iter(|| {
            supervaluate(black_box(&query), std::slice::from_ref(&s), &integrity, &bounds).unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_parse_print,
    bench_eval,
    bench_embedding,
    bench_abstraction,
    bench_enumeration,
    bench_supervaluation
);
criterion_main!(benches);

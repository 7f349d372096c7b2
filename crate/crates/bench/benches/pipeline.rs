use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pcpkg_core::fixtures;
use pcpkg_core::linkdisc::{cosine, find_links, find_links_with, tokenize_name, Blocking, LinkConfig};
use pcpkg_core::rdf::{parse_turtle, serialize_canonical};
use pcpkg_core::sparql::{evaluate, parse_query, DEFAULT_PREFIXES};

fn similarity(c: &mut Criterion) {
    let a = tokenize_name("Heinrich Matthias");
    let b = tokenize_name("Andreas Heinrich Matthias");
    c.bench_function("cosine", |bench| bench.iter(|| cosine(black_box(&a), black_box(&b))));

    let left = fixtures::graph(fixtures::LEIPZIG_CATALOGUE);
    let right = fixtures::graph(fixtures::HELMSTEDT_CATALOGUE);
    let mut cfg = LinkConfig::from_toml(fixtures::LINK_CONFIG).unwrap();
    cfg.review = 0.5;
    c.bench_function("find_links/all-pairs", |bench| {
        bench.iter(|| find_links(&left, &right, &cfg))
    });
    c.bench_function("find_links/shared-token", |bench| {
        bench.iter(|| find_links_with(&left, &right, &cfg, Blocking::SharedToken))
    });
}

fn parsing(c: &mut Criterion) {
    c.bench_function("parse_turtle/catalogue", |bench| {
        bench.iter(|| parse_turtle(black_box(fixtures::LEIPZIG_CATALOGUE), None).unwrap())
    });
    let g = fixtures::graph(fixtures::LEIPZIG_CATALOGUE);
    c.bench_function("serialize_canonical/catalogue", |bench| {
        bench.iter(|| serialize_canonical(&g))
    });
}

fn querying(c: &mut Criterion) {
    let q = parse_query(&format!("{DEFAULT_PREFIXES}\n{}", fixtures::FACULTY_YEAR_QUERY)).unwrap();
    let g = fixtures::graph(fixtures::QUALIFICATION_DOCUMENTS);
    c.bench_function("evaluate/faculty-year-counts", |bench| {
        bench.iter(|| evaluate(&q, &[&g]).unwrap())
    });
}

criterion_group!(benches, similarity, parsing, querying);
criterion_main!(benches);

use std::collections::{BTreeMap, BTreeSet};

use pcpkg_core::enrich::{dnb_gnd_url, emit_sameas, normalize_gnd, GndId};
use pcpkg_core::fusion::{compute_overlap, shift_namespace, AlignmentMapping};
use pcpkg_core::linkdisc::{cosine, find_links, tokenize_name, LinkConfig, LinkStatus};
use pcpkg_core::rdf::{ns, serialize_canonical};
use pcpkg_core::sparql::{evaluate, parse_query, QueryTemplate};
use pcpkg_core::versioning::Store;
use pcpkg_core::{Graph, Term, Triple};
use proptest::prelude::*;

const SRC: &str = "http://old.example/v#";
const TGT: &str = "http://new.example/v#";
const NAME: &str = "http://x.example/name";
const WORDS: &[&str] = &[
    "anna",
    "heinrich",
    "matthias",
    "maria",
    "christian",
    "otto",
    "von",
    "mencke",
];

fn vocab_graph() -> impl Strategy<Value = Graph> {
    let local = prop_oneof![Just("a"), Just("b"), Just("knows"), Just("Person"), Just("name")];
    let entry = (0usize..5, local.clone(), local, 0u8..3, "[a-z]{0,6}");
    proptest::collection::vec(entry, 0..40).prop_map(|entries| {
        let mut g = Graph::new();
        for (s, p, c, kind, text) in entries {
            let subject = Term::iri(format!("http://data.example/i{s}"));
            let t = match kind {
                0 => Triple::new(subject, Term::iri(ns::RDF_TYPE), Term::iri(format!("{SRC}{c}"))),
                1 => Triple::new(subject, Term::iri(format!("{SRC}{p}")), Term::literal(text)),
                _ => Triple::new(
                    subject,
                    Term::iri(format!("{SRC}{p}")),
                    Term::iri(format!("http://data.example/i{c}")),
                ),
            };
            g.insert(t.unwrap());
        }
        g
    })
}

fn literals(g: &Graph) -> BTreeSet<Term> {
    g.iter()
        .filter(|t| t.object.as_literal().is_some())
        .map(|t| t.object.clone())
        .collect()
}

fn named_graph(prefix: &str, names: &[Vec<usize>]) -> Graph {
    let mut g = Graph::new();
    for (i, words) in names.iter().enumerate() {
        let value: Vec<&str> = words.iter().map(|&w| WORDS[w]).collect();
        g.insert(
            Triple::new(
                Term::iri(format!("{prefix}{i}")),
                Term::iri(NAME),
                Term::literal(value.join(" ")),
            )
            .unwrap(),
        );
    }
    g
}

fn names(max: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    proptest::collection::vec(proptest::collection::vec(0..WORDS.len(), 1..4), 0..max)
}

fn name_config(accept: f64, review: f64) -> LinkConfig {
    LinkConfig::new(vec![(NAME.to_owned(), NAME.to_owned())], accept, review).unwrap()
}

proptest! {
    #[test]
    fn shifting_preserves_size_and_literals(g in vocab_graph()) {
        let m = AlignmentMapping::for_graph(&g, SRC, TGT, BTreeMap::new()).unwrap();
        let shifted = shift_namespace(&g, &m).unwrap();
        prop_assert_eq!(shifted.len(), g.len());
        prop_assert_eq!(literals(&shifted), literals(&g));
        prop_assert!(shifted.iter().all(|t| !t.predicate.value().starts_with(SRC)));

        let again = AlignmentMapping::for_graph(&shifted, SRC, TGT, BTreeMap::new()).unwrap();
        prop_assert_eq!(serialize_canonical(&shift_namespace(&shifted, &again).unwrap()), serialize_canonical(&shifted));
    }

    #[test]
    fn overlap_is_symmetric(
        a in proptest::collection::btree_set("[ab]:[xyz]{1,2}", 0..12),
        b in proptest::collection::btree_set("[ab]:[xyz]{1,2}", 0..12),
    ) {
        let ab = compute_overlap(&a, &b);
        prop_assert_eq!(compute_overlap(&b, &a), ab.swapped());
        prop_assert!(ab.is_consistent());
    }

    #[test]
    fn cosine_bounds_and_self_similarity(a in names(2), b in names(2)) {
        for (x, y) in a.iter().zip(&b) {
            let tx: BTreeSet<String> = x.iter().map(|&w| WORDS[w].to_owned()).collect();
            let ty: BTreeSet<String> = y.iter().map(|&w| WORDS[w].to_owned()).collect();
            let c = cosine(&tx, &ty);
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert_eq!(c, cosine(&ty, &tx));
            prop_assert_eq!(cosine(&tx, &tx), 1.0);
        }
    }

    #[test]
    fn link_scores_are_symmetric_and_bounded(a in names(12), b in names(12)) {
        let (ga, gb) = (named_graph("http://a/", &a), named_graph("http://b/", &b));
        let cfg = name_config(0.8, 0.3);
        let forward: BTreeMap<(String, String), f64> =
            find_links(&ga, &gb, &cfg).into_iter().map(|c| ((c.source, c.target), c.score)).collect();
        let backward: BTreeMap<(String, String), f64> =
            find_links(&gb, &ga, &cfg).into_iter().map(|c| ((c.target, c.source), c.score)).collect();
        prop_assert_eq!(&forward, &backward);
        prop_assert!(forward.values().all(|s| (0.3..=1.0).contains(s)));
    }

    #[test]
    fn raising_the_threshold_never_adds_links(a in names(12), b in names(12), lo in 0.0f64..1.0, d in 0.0f64..0.5) {
        let (ga, gb) = (named_graph("http://a/", &a), named_graph("http://b/", &b));
        let hi = (lo + d).min(1.0);
        let accepted = |t: f64| -> BTreeSet<(String, String)> {
            find_links(&ga, &gb, &name_config(t, 0.0))
                .into_iter()
                .filter(|c| c.status == LinkStatus::Accepted)
                .map(|c| (c.source, c.target))
                .collect()
        };
        prop_assert!(accepted(hi).is_subset(&accepted(lo)));
    }

    #[test]
    fn identical_names_score_one(a in names(8)) {
        let (ga, gb) = (named_graph("http://a/", &a), named_graph("http://b/", &a));
        let links = find_links(&ga, &gb, &name_config(1.0, 1.0));
        for i in 0..a.len() {
            let pair = (format!("http://a/{i}"), format!("http://b/{i}"));
            let hit = links.iter().find(|c| (c.source.clone(), c.target.clone()) == pair);
            prop_assert!(hit.is_some_and(|c| c.score == 1.0 && c.status == LinkStatus::Accepted));
        }
    }

    #[test]
    fn gnd_normalization_is_idempotent(n in "[1-9][0-9]{5,8}", check in "[0-9X]") {
        let id = GndId::new(&format!("{n}{check}")).unwrap();
        prop_assert_eq!(normalize_gnd(id.as_str()).unwrap(), id.clone());
        prop_assert_eq!(normalize_gnd(&dnb_gnd_url(&id)).unwrap(), id.clone());
        prop_assert_eq!(normalize_gnd(&format!("http://d-nb.info/gnd/{id}/")).unwrap(), id.clone());
        let once = normalize_gnd(&dnb_gnd_url(&id)).unwrap();
        prop_assert_eq!(normalize_gnd(once.as_str()).unwrap(), once);
    }

    #[test]
    fn sameas_links_every_matched_pair(gnds in proptest::collection::vec(0u32..20, 0..15), targets in 1usize..4) {
        let mut local = Graph::new();
        for (i, n) in gnds.iter().enumerate() {
            local.insert(
                Triple::new(
                    Term::iri(format!("http://l/{i}")),
                    Term::iri(NAME),
                    Term::literal(format!("1000{n}")),
                )
                .unwrap(),
            );
        }
        let external: BTreeMap<GndId, BTreeSet<String>> = (0u32..10)
            .map(|n| {
                let id = GndId::new(&format!("1000{n}")).unwrap();
                (id, (0..targets).map(|k| format!("http://e/{n}/{k}")).collect())
            })
            .collect();
        let links = emit_sameas(&local, NAME, &external);
        let matched = gnds.iter().filter(|&&n| n < 10).count();
        prop_assert_eq!(links.triples.len(), matched * targets);
        let mut seen = BTreeMap::new();
        for n in gnds.iter().filter(|&&n| n < 10) {
            *seen.entry(n).or_insert(0) += 1;
        }
        prop_assert_eq!(links.warnings.len(), seen.values().filter(|&&c| c > 1).count());
    }

    #[test]
    fn commits_are_deterministic_and_minimal(
        states in proptest::collection::vec(proptest::collection::btree_set(0u8..30, 1..15), 2..6),
    ) {
        let graph = |s: &BTreeSet<u8>| -> Graph {
            s.iter()
                .map(|i| Triple::new(Term::iri(format!("http://s/{}", i % 5)), Term::iri(NAME), Term::literal(i.to_string())).unwrap())
                .collect()
        };
        let build = || {
            let mut store = Store::in_memory();
            for (k, s) in states.iter().enumerate() {
                let _ = store.commit("http://g", &graph(s), "p", "m", k as i64);
            }
            store
        };
        let (a, b) = (build(), build());
        let ids = |s: &Store| s.commits().iter().map(|c| c.id.clone()).collect::<Vec<_>>();
        prop_assert_eq!(ids(&a), ids(&b));

        let mut prev = Graph::new();
        for c in a.commits() {
            let next = a.checkout(&c.id).unwrap();
            prop_assert!(c.changes.added.iter().all(|t| !prev.contains(t) && next.contains(t)));
            prop_assert!(c.changes.removed.iter().all(|t| prev.contains(t) && !next.contains(t)));
            prop_assert_eq!(c.changes.len(), prev.difference(&next).len() + next.difference(&prev).len());
            prev = next;
        }
    }

    #[test]
    fn literal_placeholders_round_trip(value in "\\PC{0,12}") {
        let template = QueryTemplate::new("SELECT ?s WHERE { ?s <http://x.example/name> \"{v}\" }");
        let text = template.instantiate(&BTreeMap::from([("v".to_owned(), value.clone())])).unwrap();
        let q = parse_query(&text).unwrap();
        let g: Graph = [Triple::new(Term::iri("http://x.example/s"), Term::iri(NAME), Term::literal(value)).unwrap()]
            .into_iter()
            .collect();
        prop_assert_eq!(evaluate(&q, &[&g]).unwrap().len(), 1);
    }

    #[test]
    fn token_sets_ignore_case_and_separators(a in names(1)) {
        for words in &a {
            let plain: Vec<&str> = words.iter().map(|&w| WORDS[w]).collect();
            let shouty = plain.join(", ").to_uppercase();
            prop_assert_eq!(tokenize_name(&shouty), tokenize_name(&plain.join(" ")));
        }
    }
}

/// Scores of every pair computed from scratch, compared with the linker at review 0.5.
#[test]
fn fifty_by_fifty_matches_brute_force() {
    let mut runner = proptest::test_runner::TestRunner::default();
    let side = proptest::collection::vec(proptest::collection::vec(0..WORDS.len(), 1..4), 50);
    runner
        .run(&(side.clone(), side), |(a, b)| {
            let (ga, gb) = (named_graph("http://a/", &a), named_graph("http://b/", &b));
            let got: BTreeMap<(String, String), f64> = find_links(&ga, &gb, &name_config(0.9, 0.5))
                .into_iter()
                .map(|c| ((c.source, c.target), c.score))
                .collect();
            let mut expected = BTreeMap::new();
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    let tx: BTreeSet<&str> = x.iter().map(|&w| WORDS[w]).collect();
                    let ty: BTreeSet<&str> = y.iter().map(|&w| WORDS[w]).collect();
                    let shared = tx.intersection(&ty).count() as f64;
                    let score = shared / ((tx.len() * ty.len()) as f64).sqrt();
                    if score >= 0.5 {
                        expected.insert((format!("http://a/{i}"), format!("http://b/{j}")), score);
                    }
                }
            }
            prop_assert_eq!(got.keys().collect::<Vec<_>>(), expected.keys().collect::<Vec<_>>());
            for (k, s) in &got {
                prop_assert!((s - expected[k]).abs() < 1e-12);
            }
            Ok(())
        })
        .unwrap();
}

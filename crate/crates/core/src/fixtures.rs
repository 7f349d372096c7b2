//! Bundled fixture corpus, shaped after the published catalogue excerpts and
//! statistics. The files live under `crates/core/fixtures/`.

use crate::rdf::{parse_turtle, Graph};

pub const PERSON_LEIPZIG: &str = include_str!("../fixtures/person_leipzig.ttl");
pub const PERSON_HELMSTEDT: &str = include_str!("../fixtures/person_helmstedt.ttl");
/// 72 properties / 39 classes.
pub const LEIPZIG_CATALOGUE: &str = include_str!("../fixtures/leipzig_catalogue.ttl");
/// 56 properties / 21 classes; 21 properties and 16 classes shared by local name with Leipzig.
pub const HELMSTEDT_CATALOGUE: &str = include_str!("../fixtures/helmstedt_catalogue.ttl");
pub const QUALIFICATION_DOCUMENTS: &str = include_str!("../fixtures/qualification_documents.ttl");
pub const ONTOLOGY_CLEAN: &str = include_str!("../fixtures/ontology_clean.ttl");
pub const ONTOLOGY_ISSUES: &str = include_str!("../fixtures/ontology_issues.ttl");
/// Three professors with GND references in URL, bare and IRI form.
pub const PROFESSORS_GND: &str = include_str!("../fixtures/professors_gnd.ttl");
pub const QUALITY_RENAMES: &str = include_str!("../fixtures/quality_renames.tsv");
pub const LINK_CONFIG: &str = include_str!("../fixtures/link.toml");
/// The faculty/year count query, without prefix declarations.
pub const FACULTY_YEAR_QUERY: &str = include_str!("../fixtures/faculty_year_counts.rq");
pub const SELECT_ALL_QUERY: &str = include_str!("../fixtures/select_all.rq");

/// Every bundled Turtle document, by file name.
pub const TURTLE_CORPUS: &[(&str, &str)] = &[
    ("person_leipzig.ttl", PERSON_LEIPZIG),
    ("person_helmstedt.ttl", PERSON_HELMSTEDT),
    ("leipzig_catalogue.ttl", LEIPZIG_CATALOGUE),
    ("helmstedt_catalogue.ttl", HELMSTEDT_CATALOGUE),
    ("qualification_documents.ttl", QUALIFICATION_DOCUMENTS),
    ("ontology_clean.ttl", ONTOLOGY_CLEAN),
    ("ontology_issues.ttl", ONTOLOGY_ISSUES),
    ("professors_gnd.ttl", PROFESSORS_GND),
];

/// Recorded DNB responses for the three GNDs of [`PROFESSORS_GND`].
pub const RECORDED_DNB_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/recorded/dnb");

/// Parses a bundled document; panics on malformed fixtures.
pub fn graph(text: &str) -> Graph {
    parse_turtle(text, None).expect("bundled fixture parses")
}

//! Building blocks for a prosopographical knowledge graph pipeline: fusing
//! catalogue vocabularies, discovering same-person links, standardizing GND
//! identifiers and enriching from external endpoints, versioning graph states
//! as triple changesets, and answering questions with a small SPARQL subset.

pub mod enrich;
pub mod fixtures;
pub mod fusion;
pub mod linkdisc;
pub mod rdf;
pub mod sparql;
pub mod versioning;

pub use rdf::{Graph, Literal, Term, Triple};

//! RDF data model, Turtle/N-Triples reading, canonical N-Triples writing and
//! an indexed in-memory graph.

mod graph;
pub mod ns;
mod ntriples;
pub(crate) mod term;
mod turtle;

pub use graph::Graph;
pub use ntriples::{serialize_canonical, to_ntriples_sorted};
pub use term::{is_absolute_iri, Literal, Term, Triple, TripleError};
pub use turtle::{parse_ntriples, parse_turtle, ParseError};

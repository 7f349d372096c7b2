//! Instance matching by token-set cosine over name properties.

mod config;
mod links;

use std::collections::BTreeSet;

pub use config::{LinkConfig, LinkConfigError};
pub use links::{
    emit_review_report, emit_sameas_ntriples, find_links, find_links_with, Blocking, LinkCandidate, LinkStatus,
    PairEvidence,
};

/// Lowercased tokens split on whitespace, `-`, `,` and `.`.
pub fn tokenize_name(value: &str) -> BTreeSet<String> {
    value
        .split(|c: char| c.is_whitespace() || matches!(c, '-' | ',' | '.'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// `|a ∩ b| / sqrt(|a| * |b|)`, or 0 when either side is empty.
pub fn cosine(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let shared = a.intersection(b).count();
    shared as f64 / ((a.len() * b.len()) as f64).sqrt()
}

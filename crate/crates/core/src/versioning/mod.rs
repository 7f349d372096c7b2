//! Linear commit history of graph changesets, optionally persisted to disk.

mod store;

use std::collections::BTreeSet;

use crate::rdf::{Graph, Triple};

pub use store::{Commit, LogEntry, Store, VersionError};

/// Triples added to and removed from one named graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChangeSet {
    pub graph: String,
    pub added: BTreeSet<Triple>,
    pub removed: BTreeSet<Triple>,
}

impl ChangeSet {
    /// Minimal changeset turning `old` into `new`.
    pub fn between(graph: impl Into<String>, old: &Graph, new: &Graph) -> Self {
        ChangeSet {
            graph: graph.into(),
            added: new.difference(old).into_iter().collect(),
            removed: old.difference(new).into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    pub fn len(&self) -> usize {
        self.added.len() + self.removed.len()
    }

    pub fn inverse(&self) -> Self {
        ChangeSet {
            graph: self.graph.clone(),
            added: self.removed.clone(),
            removed: self.added.clone(),
        }
    }

    pub fn apply(&self, g: &mut Graph) {
        for t in &self.removed {
            g.remove(t);
        }
        for t in &self.added {
            g.insert(t.clone());
        }
    }
}

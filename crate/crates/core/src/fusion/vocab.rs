use std::collections::BTreeSet;

use crate::rdf::{ns, Graph, Term};

/// Properties and classes used or declared in a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub properties: BTreeSet<String>,
    pub classes: BTreeSet<String>,
}

impl Vocabulary {
    pub fn contains(&self, iri: &str) -> bool {
        self.properties.contains(iri) || self.classes.contains(iri)
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.properties.iter().chain(self.classes.iter())
    }
}

const PROPERTY_TYPES: &[&str] = &[
    ns::RDF_PROPERTY,
    ns::OWL_OBJECT_PROPERTY,
    ns::OWL_DATATYPE_PROPERTY,
    ns::OWL_ANNOTATION_PROPERTY,
];
const CLASS_TYPES: &[&str] = &[ns::RDFS_CLASS, ns::OWL_CLASS];

/// Collects every predicate and declared property, and every `rdf:type`
/// object and declared class. The declaration meta-classes themselves
/// (`owl:Class`, `rdf:Property`, ...) are not counted as classes.
pub fn extract_vocabulary(g: &Graph) -> Vocabulary {
    let rdf_type = Term::iri(ns::RDF_TYPE);
    let mut vocab = Vocabulary::default();
    for t in g.iter() {
        if let Term::Iri(p) = &t.predicate {
            vocab.properties.insert(p.clone());
        }
        if t.predicate != rdf_type {
            continue;
        }
        let Term::Iri(object) = &t.object else {
            continue;
        };
        let object = object.as_str();
        if PROPERTY_TYPES.contains(&object) {
            if let Term::Iri(subject) = &t.subject {
                vocab.properties.insert(subject.clone());
            }
        } else if CLASS_TYPES.contains(&object) {
            if let Term::Iri(subject) = &t.subject {
                vocab.classes.insert(subject.clone());
            }
        } else {
            vocab.classes.insert(object.to_owned());
        }
    }
    vocab
}

/// Joint/disjoint/union counts of two vocabularies compared by local name.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OverlapStats {
    pub joint: usize,
    pub disjoint_a: usize,
    pub disjoint_b: usize,
    pub union_a: usize,
    pub union_b: usize,
}

impl OverlapStats {
    /// `union = joint + disjoint` on both sides.
    pub fn is_consistent(&self) -> bool {
        self.union_a == self.joint + self.disjoint_a && self.union_b == self.joint + self.disjoint_b
    }

    pub fn swapped(&self) -> Self {
        OverlapStats {
            joint: self.joint,
            disjoint_a: self.disjoint_b,
            disjoint_b: self.disjoint_a,
            union_a: self.union_b,
            union_b: self.union_a,
        }
    }
}

fn local_names<'a>(iris: impl IntoIterator<Item = &'a String>) -> BTreeSet<&'a str> {
    iris.into_iter().map(|i| ns::local_name(i)).collect()
}

/// Compares two term sets by case-sensitive local name after stripping the namespace.
pub fn compute_overlap<'a>(
    a: impl IntoIterator<Item = &'a String>,
    b: impl IntoIterator<Item = &'a String>,
) -> OverlapStats {
    let a = local_names(a);
    let b = local_names(b);
    let joint = a.intersection(&b).count();
    OverlapStats {
        joint,
        disjoint_a: a.len() - joint,
        disjoint_b: b.len() - joint,
        union_a: a.len(),
        union_b: b.len(),
    }
}

/// Per-subset property/class counts plus the IRI-deduplicated total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetStatistics {
    pub rows: Vec<(String, usize, usize)>,
    pub column_sum: (usize, usize),
    pub deduplicated: (usize, usize),
}

pub fn subset_statistics<'a>(subsets: impl IntoIterator<Item = (&'a str, &'a Graph)>) -> SubsetStatistics {
    let mut rows = Vec::new();
    let mut all = Vocabulary::default();
    for (name, g) in subsets {
        let v = extract_vocabulary(g);
        rows.push((name.to_owned(), v.properties.len(), v.classes.len()));
        all.properties.extend(v.properties);
        all.classes.extend(v.classes);
    }
    let column_sum = rows.iter().fold((0, 0), |(p, c), (_, rp, rc)| (p + rp, c + rc));
    SubsetStatistics {
        rows,
        column_sum,
        deduplicated: (all.properties.len(), all.classes.len()),
    }
}

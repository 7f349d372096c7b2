use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::RangeInclusive;

use super::term::{Term, Triple};

type TermId = u32;
type Key = [TermId; 3];

fn range(a: TermId, b: Option<TermId>) -> RangeInclusive<Key> {
    match b {
        Some(b) => [a, b, 0]..=[a, b, TermId::MAX],
        None => [a, 0, 0]..=[a, TermId::MAX, TermId::MAX],
    }
}

/// An in-memory set of triples with SPO, POS and OSP indexes.
///
/// Terms are interned; every index stores id triples, so any pattern with at
/// least one bound position is answered with a range scan. Equality compares
/// the triple sets only (name and prefixes are metadata).
#[derive(Clone, Default)]
pub struct Graph {
    name: Option<String>,
    prefixes: BTreeMap<String, String>,
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    spo: BTreeSet<Key>,
    pos: BTreeSet<Key>,
    osp: BTreeSet<Key>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn named(name: impl Into<String>) -> Self {
        Graph {
            name: Some(name.into()),
            ..Self::default()
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn set_name(&mut self, name: Option<String>) {
        self.name = name;
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    /// Binds `prefix` to `namespace`, replacing any earlier binding.
    pub fn set_prefix(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(prefix.into(), namespace.into());
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term table overflow");
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }

    fn id_of(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    fn triple_of(&self, [s, p, o]: Key) -> Triple {
        Triple {
            subject: self.term(s).clone(),
            predicate: self.term(p).clone(),
            object: self.term(o).clone(),
        }
    }

    /// Adds a triple; returns false when it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let s = self.intern(triple.subject);
        let p = self.intern(triple.predicate);
        let o = self.intern(triple.object);
        if !self.spo.insert([s, p, o]) {
            return false;
        }
        self.pos.insert([p, o, s]);
        self.osp.insert([o, s, p]);
        true
    }

    /// Removes a triple; returns false when it was absent.
    pub fn remove(&mut self, triple: &Triple) -> bool {
        let Some(key) = self.key_of(triple) else {
            return false;
        };
        if !self.spo.remove(&key) {
            return false;
        }
        let [s, p, o] = key;
        self.pos.remove(&[p, o, s]);
        self.osp.remove(&[o, s, p]);
        true
    }

    fn key_of(&self, triple: &Triple) -> Option<Key> {
        Some([
            self.id_of(&triple.subject)?,
            self.id_of(&triple.predicate)?,
            self.id_of(&triple.object)?,
        ])
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.key_of(triple).is_some_and(|k| self.spo.contains(&k))
    }

    /// All triples in canonical (term) order.
    pub fn triples(&self) -> Vec<Triple> {
        self.match_pattern(None, None, None)
    }

    /// Triples in index order; cheaper than [`Graph::triples`] when order
    /// does not matter.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&k| self.triple_of(k))
    }

    /// Every distinct term occurring in some triple.
    pub fn terms(&self) -> BTreeSet<Term> {
        let mut used = BTreeSet::new();
        for &[s, p, o] in &self.spo {
            used.insert(s);
            used.insert(p);
            used.insert(o);
        }
        used.into_iter().map(|id| self.term(id).clone()).collect()
    }

    /// Returns the triples agreeing with every bound position, sorted canonically.
    pub fn match_pattern(
        &self,
        subject: Option<&Term>,
        predicate: Option<&Term>,
        object: Option<&Term>,
    ) -> Vec<Triple> {
        let mut out = self.match_unordered(subject, predicate, object);
        out.sort_unstable();
        out
    }

    pub(crate) fn match_unordered(
        &self,
        subject: Option<&Term>,
        predicate: Option<&Term>,
        object: Option<&Term>,
    ) -> Vec<Triple> {
        let lookup = |t: Option<&Term>| match t {
            None => Some(None),
            Some(t) => self.id_of(t).map(Some),
        };
        let (Some(s), Some(p), Some(o)) = (lookup(subject), lookup(predicate), lookup(object)) else {
            return Vec::new();
        };
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                if self.spo.contains(&[s, p, o]) {
                    vec![self.triple_of([s, p, o])]
                } else {
                    Vec::new()
                }
            }
            (Some(s), p, None) => self.spo.range(range(s, p)).map(|&k| self.triple_of(k)).collect(),
            (None, Some(p), o) => self
                .pos
                .range(range(p, o))
                .map(|&[p, o, s]| self.triple_of([s, p, o]))
                .collect(),
            (s, None, Some(o)) => self
                .osp
                .range(range(o, s))
                .map(|&[o, s, p]| self.triple_of([s, p, o]))
                .collect(),
            (None, None, None) => self.iter().collect(),
        }
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects(&self, subject: &Term, predicate: &Term) -> Vec<Term> {
        self.match_pattern(Some(subject), Some(predicate), None)
            .into_iter()
            .map(|t| t.object)
            .collect()
    }

    /// Distinct subjects of `(?, predicate, object)`.
    pub fn subjects(&self, predicate: &Term, object: &Term) -> Vec<Term> {
        self.match_pattern(None, Some(predicate), Some(object))
            .into_iter()
            .map(|t| t.subject)
            .collect()
    }

    /// Adds every triple of `other`, merging prefixes that are not yet bound.
    pub fn extend_from(&mut self, other: &Graph) {
        for t in other.iter() {
            self.insert(t);
        }
        for (p, ns) in &other.prefixes {
            self.prefixes.entry(p.clone()).or_insert_with(|| ns.clone());
        }
    }

    /// Triples of `self` that are not in `other`, canonical order.
    pub fn difference(&self, other: &Graph) -> Vec<Triple> {
        let mut out: Vec<Triple> = self.iter().filter(|t| !other.contains(t)).collect();
        out.sort_unstable();
        out
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|t| other.contains(&t))
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("name", &self.name)
            .field("len", &self.len())
            .field("triples", &self.triples())
            .finish()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::ns;

    fn sample() -> Graph {
        let h = "http://purl.org/pcp-on-web/helmstedt#";
        let s = format!("{h}13084");
        [
            Triple::iri(&s, ns::RDFS_LABEL, Term::literal("Andreas Heinrich Matthias")),
            Triple::iri(&s, &format!("{h}forename"), Term::literal("Andreas Heinrich")),
            Triple::iri(&s, &format!("{h}surname"), Term::literal("Matthias")),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn insert_is_idempotent() {
        let mut g = sample();
        let t = g.triples()[0].clone();
        assert!(!g.insert(t));
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn remove_updates_every_index() {
        let mut g = sample();
        let t = g.triples()[0].clone();
        assert!(g.remove(&t));
        assert!(!g.remove(&t));
        assert_eq!(g.len(), 2);
        assert!(g.match_pattern(None, Some(&t.predicate), None).is_empty());
        assert!(g.match_pattern(None, None, Some(&t.object)).is_empty());
    }

    #[test]
    fn match_on_empty_graph() {
        assert!(Graph::new().match_pattern(None, None, None).is_empty());
    }

    #[test]
    fn match_subject_and_predicate() {
        let g = sample();
        let s = Term::iri("http://purl.org/pcp-on-web/helmstedt#13084");
        let hits = g.match_pattern(Some(&s), Some(&Term::iri(ns::RDFS_LABEL)), None);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].object, Term::literal("Andreas Heinrich Matthias"));
    }

    #[test]
    fn unknown_term_matches_nothing() {
        let g = sample();
        assert!(g.match_pattern(Some(&Term::iri("urn:nope")), None, None).is_empty());
    }

    #[test]
    fn equality_ignores_insertion_order_and_metadata() {
        let a = sample();
        let mut b: Graph = a.triples().into_iter().rev().collect();
        b.set_name(Some("urn:g".into()));
        assert_eq!(a, b);
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::vocab::{extract_vocabulary, OverlapStats};
use crate::rdf::{Graph, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MappingError {
    #[error("mapping file line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("`{0}` is both renamed and auto-shifted")]
    Overlap(String),
    #[error("rename chain through `{0}` is not idempotent")]
    Chain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlignError {
    #[error("{} vocabulary IRI(s) not covered by the mapping: {}", .0.len(), .0.join(", "))]
    Uncovered(Vec<String>),
    #[error("rewriting merges {} distinct triple(s), e.g. {}", .0.len(), .0[0])]
    Collision(Vec<Triple>),
}

/// Reads `old-local-name TAB new-local-name` lines; `#` starts a comment.
pub fn parse_renames(text: &str) -> Result<BTreeMap<String, String>, MappingError> {
    let mut renames = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim_end_matches(['\r', ' ']);
        if content.trim().is_empty() {
            continue;
        }
        let mut cols = content.split('\t');
        let (Some(old), Some(new), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(MappingError::Syntax {
                line,
                message: "expected exactly two tab-separated columns".into(),
            });
        };
        let (old, new) = (old.trim(), new.trim());
        if old.is_empty() || new.is_empty() || old.contains(['/', '#', ' ']) || new.contains(['/', '#', ' ']) {
            return Err(MappingError::Syntax {
                line,
                message: "columns must be non-empty local names".into(),
            });
        }
        if renames.insert(old.to_owned(), new.to_owned()).is_some() {
            return Err(MappingError::Syntax {
                line,
                message: format!("`{old}` renamed twice"),
            });
        }
    }
    Ok(renames)
}

/// Rewrites a source vocabulary into a target namespace. Local names are
/// either renamed (reviewed input) or auto-shifted unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentMapping {
    source_namespace: String,
    target_namespace: String,
    renames: BTreeMap<String, String>,
    auto_shifted: BTreeSet<String>,
    pub stats: OverlapStats,
}

impl AlignmentMapping {
    pub fn new(
        source_namespace: impl Into<String>,
        target_namespace: impl Into<String>,
        renames: BTreeMap<String, String>,
        auto_shifted: BTreeSet<String>,
    ) -> Result<Self, MappingError> {
        let source_namespace = source_namespace.into();
        let target_namespace = target_namespace.into();
        if let Some(both) = renames.keys().find(|k| auto_shifted.contains(*k)) {
            return Err(MappingError::Overlap(both.clone()));
        }
        if source_namespace == target_namespace {
            if let Some(v) = renames.values().find(|v| renames.contains_key(*v)) {
                return Err(MappingError::Chain(v.clone()));
            }
        }
        Ok(AlignmentMapping {
            source_namespace,
            target_namespace,
            renames,
            auto_shifted,
            stats: OverlapStats::default(),
        })
    }

    /// Auto-shifts every vocabulary local name of `g` under the source
    /// namespace that is not explicitly renamed.
    pub fn for_graph(
        g: &Graph,
        source_namespace: &str,
        target_namespace: &str,
        renames: BTreeMap<String, String>,
    ) -> Result<Self, MappingError> {
        let vocab = extract_vocabulary(g);
        let auto_shifted = vocab
            .iter()
            .filter_map(|iri| iri.strip_prefix(source_namespace))
            .filter(|local| !renames.contains_key(*local))
            .filter(|local| source_namespace != target_namespace || !renames.values().any(|v| v == local))
            .map(str::to_owned)
            .collect();
        Self::new(source_namespace, target_namespace, renames, auto_shifted)
    }

    pub fn source_namespace(&self) -> &str {
        &self.source_namespace
    }

    pub fn target_namespace(&self) -> &str {
        &self.target_namespace
    }

    pub fn renames(&self) -> &BTreeMap<String, String> {
        &self.renames
    }

    pub fn auto_shifted(&self) -> &BTreeSet<String> {
        &self.auto_shifted
    }

    /// `Ok(Some(new))` when covered, `Ok(None)` when outside the source
    /// namespace or already a rename target, `Err(())` when uncovered.
    fn rewrite(&self, iri: &str) -> Result<Option<String>, ()> {
        let Some(local) = iri.strip_prefix(&self.source_namespace) else {
            return Ok(None);
        };
        if let Some(new) = self.renames.get(local) {
            return Ok(Some(format!("{}{new}", self.target_namespace)));
        }
        if self.auto_shifted.contains(local) {
            return Ok(Some(format!("{}{local}", self.target_namespace)));
        }
        if self.source_namespace == self.target_namespace && self.renames.values().any(|v| v == local) {
            return Ok(None);
        }
        Err(())
    }
}

/// Rewrites every vocabulary IRI of `g` under the mapping's source namespace.
/// Instance IRIs and literals are left alone; uncovered vocabulary is
/// reported as one batch.
pub fn shift_namespace(g: &Graph, m: &AlignmentMapping) -> Result<Graph, AlignError> {
    let vocab = extract_vocabulary(g);
    let mut table: BTreeMap<&str, String> = BTreeMap::new();
    let mut uncovered = Vec::new();
    for iri in vocab.iter() {
        match m.rewrite(iri) {
            Ok(Some(new)) => {
                table.insert(iri, new);
            }
            Ok(None) => {}
            Err(()) => uncovered.push(iri.clone()),
        }
    }
    if !uncovered.is_empty() {
        uncovered.sort();
        uncovered.dedup();
        return Err(AlignError::Uncovered(uncovered));
    }
    let map = |t: Term| match &t {
        Term::Iri(iri) => table.get(iri.as_str()).map_or(t.clone(), |n| Term::iri(n.clone())),
        _ => t,
    };
    let mut out = Graph::new();
    out.set_name(g.name().map(str::to_owned));
    for (p, ns) in g.prefixes() {
        out.set_prefix(p.clone(), ns.clone());
    }
    let mut collisions = Vec::new();
    for t in g.triples() {
        let rewritten = Triple {
            subject: map(t.subject.clone()),
            predicate: map(t.predicate.clone()),
            object: map(t.object.clone()),
        };
        if !out.insert(rewritten) {
            collisions.push(t);
        }
    }
    if !collisions.is_empty() {
        return Err(AlignError::Collision(collisions));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rdf::{ns, parse_turtle};

    #[test]
    fn parses_mapping_file() {
        let r = parse_renames(fixtures::QUALITY_RENAMES).unwrap();
        assert_eq!(r.get("surname_lat").map(String::as_str), Some("latinSurname"));
        assert_eq!(r.get("lecture").map(String::as_str), Some("lecturer"));
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn mapping_file_errors_carry_line_numbers() {
        assert_eq!(
            parse_renames("# c\nok\tfine\nbroken line\n"),
            Err(MappingError::Syntax {
                line: 3,
                message: "expected exactly two tab-separated columns".into()
            })
        );
        assert!(matches!(
            parse_renames("a\tb\na\tc\n"),
            Err(MappingError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn identity_shift_to_common_namespace() {
        let g = fixtures::graph(fixtures::PERSON_LEIPZIG);
        let m = AlignmentMapping::for_graph(&g, ns::LEIPZIG, ns::PCP, BTreeMap::new()).unwrap();
        let out = shift_namespace(&g, &m).unwrap();
        assert_eq!(out.len(), 3);
        let subject = Term::iri(format!("{}heinrichmatthiasheinrichs", ns::LEIPZIG));
        assert_eq!(
            out.objects(&subject, &Term::iri(format!("{}surname", ns::PCP))),
            [Term::literal("Heinrichs")]
        );
        assert!(out
            .match_pattern(None, Some(&Term::iri(format!("{}surname", ns::LEIPZIG))), None)
            .is_empty());
    }

    #[test]
    fn quality_renames_within_target_namespace() {
        let g = fixtures::graph(fixtures::ONTOLOGY_ISSUES);
        let renames = parse_renames(fixtures::QUALITY_RENAMES).unwrap();
        let m = AlignmentMapping::for_graph(&g, ns::PCP, ns::PCP, renames).unwrap();
        let out = shift_namespace(&g, &m).unwrap();
        let vocab = extract_vocabulary(&out);
        assert!(vocab.properties.contains(&format!("{}latinSurname", ns::PCP)));
        assert!(vocab.properties.contains(&format!("{}lecturer", ns::PCP)));
        assert!(!vocab.properties.contains(&format!("{}surname_lat", ns::PCP)));
        assert!(!vocab.properties.contains(&format!("{}lecture", ns::PCP)));
        assert_eq!(out.len(), g.len());
        assert_eq!(shift_namespace(&out, &m).unwrap().triples(), out.triples());
    }

    #[test]
    fn uncovered_terms_are_reported_together() {
        let g = parse_turtle(
            "@prefix l: <http://purl.org/pcp-on-web/leipzig#> .\n<http://x/1> l:a 1 ; l:b 2 ; a l:C .",
            None,
        )
        .unwrap();
        let m =
            AlignmentMapping::new(ns::LEIPZIG, ns::PCP, BTreeMap::new(), BTreeSet::from(["a".to_string()])).unwrap();
        match shift_namespace(&g, &m) {
            Err(AlignError::Uncovered(list)) => {
                assert_eq!(list, [format!("{}C", ns::LEIPZIG), format!("{}b", ns::LEIPZIG)])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn instance_iris_in_source_namespace_are_untouched() {
        let g = fixtures::graph(fixtures::LEIPZIG_CATALOGUE);
        let m = AlignmentMapping::for_graph(&g, ns::LEIPZIG, ns::PCP, BTreeMap::new()).unwrap();
        let out = shift_namespace(&g, &m).unwrap();
        let person = Term::iri(format!("{}heinrichmatthiasheinrichs", ns::LEIPZIG));
        assert!(!out.match_pattern(Some(&person), None, None).is_empty());
        assert!(out.contains(&Triple {
            subject: person,
            predicate: Term::iri(ns::RDF_TYPE),
            object: Term::iri(format!("{}Professor", ns::PCP)),
        }));
    }

    #[test]
    fn invalid_mappings() {
        let r = BTreeMap::from([("a".to_string(), "b".to_string())]);
        assert_eq!(
            AlignmentMapping::new("http://s#", "http://t#", r.clone(), BTreeSet::from(["a".to_string()])),
            Err(MappingError::Overlap("a".into()))
        );
        let chain = BTreeMap::from([("a".to_string(), "b".to_string()), ("b".to_string(), "c".to_string())]);
        assert!(matches!(
            AlignmentMapping::new("http://s#", "http://s#", chain, BTreeSet::new()),
            Err(MappingError::Chain(_))
        ));
    }

    #[test]
    fn merging_triples_is_a_collision() {
        let g = parse_turtle(
            "<http://x/1> <http://s#name> \"a\" .\n<http://x/1> <http://t#name> \"a\" .",
            None,
        )
        .unwrap();
        let m = AlignmentMapping::for_graph(&g, "http://s#", "http://t#", BTreeMap::new()).unwrap();
        assert!(matches!(shift_namespace(&g, &m), Err(AlignError::Collision(_))));
    }
}

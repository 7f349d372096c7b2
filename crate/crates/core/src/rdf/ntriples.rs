//! N-Triples writers.

use std::collections::{BTreeMap, HashMap};

use super::graph::Graph;
use super::term::{Term, Triple};

fn write_lines(lines: impl Iterator<Item = String>) -> String {
    let mut lines: Vec<String> = lines.collect();
    lines.sort_unstable();
    lines.dedup();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// N-Triples with lines sorted by byte order; blank node labels are kept.
pub fn to_ntriples_sorted<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    write_lines(triples.into_iter().map(Triple::to_string))
}

/// Canonical N-Triples: blank nodes relabeled deterministically, lines
/// sorted by byte order, LF endings. Two graphs with equal triple sets (up to
/// blank node labels, for acyclic blank structures) yield identical bytes.
pub fn serialize_canonical(graph: &Graph) -> String {
    let relabel = canonical_blank_labels(graph);
    let map = |t: &Term| match t {
        Term::Blank(label) => Term::Blank(relabel[label].clone()),
        other => other.clone(),
    };
    write_lines(graph.iter().map(|t| {
        Triple {
            subject: map(&t.subject),
            predicate: t.predicate.clone(),
            object: map(&t.object),
        }
        .to_string()
    }))
}

/// Orders blank nodes by the sorted signature of the triples they occur in
/// (other blank nodes masked), breaking ties by the original label.
fn canonical_blank_labels(graph: &Graph) -> HashMap<String, String> {
    let mut signatures: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mask = |t: &Term, this: &str| match t {
        Term::Blank(l) if l == this => "_:self".to_owned(),
        Term::Blank(_) => "_:*".to_owned(),
        other => other.to_string(),
    };
    for t in graph.iter() {
        if let Term::Blank(b) = &t.subject {
            signatures
                .entry(b.clone())
                .or_default()
                .push(format!("out {} {}", t.predicate, mask(&t.object, b)));
        }
        if let Term::Blank(b) = &t.object {
            signatures
                .entry(b.clone())
                .or_default()
                .push(format!("in {} {}", mask(&t.subject, b), t.predicate));
        }
    }
    let mut blanks: Vec<(Vec<String>, String)> = signatures
        .into_iter()
        .map(|(label, mut sig)| {
            sig.sort_unstable();
            (sig, label)
        })
        .collect();
    blanks.sort_by(|(sa, la), (sb, lb)| sa.cmp(sb).then(la.len().cmp(&lb.len())).then(la.cmp(lb)));
    blanks
        .into_iter()
        .enumerate()
        .map(|(i, (_, label))| (label, format!("b{i}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::turtle::parse_turtle;

    #[test]
    fn empty_graph_serializes_to_empty_document() {
        assert_eq!(serialize_canonical(&Graph::new()), "");
    }

    #[test]
    fn expands_prefixed_names_and_sorts() {
        let g = parse_turtle(
            r#"@prefix helmstedt: <http://purl.org/pcp-on-web/helmstedt#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
helmstedt:13084 rdfs:label "Andreas Heinrich Matthias" . helmstedt:13084 helmstedt:forename "Andreas Heinrich" . helmstedt:13084 helmstedt:surname "Matthias" ."#,
            None,
        )
        .unwrap();
        let out = serialize_canonical(&g);
        assert_eq!(
            out,
            "<http://purl.org/pcp-on-web/helmstedt#13084> <http://purl.org/pcp-on-web/helmstedt#forename> \"Andreas Heinrich\" .\n\
             <http://purl.org/pcp-on-web/helmstedt#13084> <http://purl.org/pcp-on-web/helmstedt#surname> \"Matthias\" .\n\
             <http://purl.org/pcp-on-web/helmstedt#13084> <http://www.w3.org/2000/01/rdf-schema#label> \"Andreas Heinrich Matthias\" .\n"
        );
    }

    #[test]
    fn blank_labels_do_not_affect_output() {
        let a = parse_turtle(
            "_:x <http://p> \"1\" .\n_:y <http://p> \"2\" .\n<http://s> <http://q> _:x .",
            None,
        )
        .unwrap();
        let b = parse_turtle(
            "_:q9 <http://p> \"1\" .\n_:a <http://p> \"2\" .\n<http://s> <http://q> _:q9 .",
            None,
        )
        .unwrap();
        assert_eq!(serialize_canonical(&a), serialize_canonical(&b));
    }

    #[test]
    fn canonical_labels_are_a_fixed_point() {
        let mut doc = String::new();
        for i in 0..12 {
            doc.push_str(&format!("_:n{i} <http://p> <http://o> .\n"));
        }
        let g = parse_turtle(&doc, None).unwrap();
        let once = serialize_canonical(&g);
        let twice = serialize_canonical(&parse_turtle(&once, None).unwrap());
        assert_eq!(once, twice);
    }
}

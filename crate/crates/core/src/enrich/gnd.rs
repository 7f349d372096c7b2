use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::rdf::{ns, Graph, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a GND number or DNB GND URL: {0:?}")]
pub struct GndError(pub String);

/// A bare GND number such as `118755951` or `4036770-5`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GndId(String);

fn is_gnd_number(s: &str) -> bool {
    let bytes = s.as_bytes();
    let Some((&last, body)) = bytes.split_last() else {
        return false;
    };
    if !bytes[0].is_ascii_digit() || !(last.is_ascii_digit() || last == b'X') {
        return false;
    }
    body.iter().all(|&c| c.is_ascii_digit() || c == b'-') && !s.contains("--")
}

impl GndId {
    pub fn new(number: &str) -> Result<Self, GndError> {
        if is_gnd_number(number) {
            Ok(GndId(number.to_owned()))
        } else {
            Err(GndError(number.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GndId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for GndId {
    type Err = GndError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize_gnd(s)
    }
}

/// Accepts a bare number or an `http(s)://d-nb.info/gnd/<number>` URL,
/// with trailing slashes or an `/about/lds` suffix.
pub fn normalize_gnd(value: &str) -> Result<GndId, GndError> {
    let trimmed = value.trim();
    let rest = trimmed
        .strip_prefix("https://")
        .or_else(|| trimmed.strip_prefix("http://"));
    let number = match rest {
        Some(rest) => {
            let path = rest
                .strip_prefix("d-nb.info/gnd/")
                .ok_or_else(|| GndError(value.to_owned()))?
                .trim_end_matches('/');
            path.strip_suffix("/about/lds").unwrap_or(path)
        }
        None => trimmed,
    };
    GndId::new(number).map_err(|_| GndError(value.to_owned()))
}

/// `https://d-nb.info/gnd/<number>`
pub fn dnb_gnd_url(id: &GndId) -> String {
    format!("{}{}", ns::GND, id)
}

/// `https://d-nb.info/gnd/<number>/about/lds`
pub fn dnb_document_url(id: &GndId) -> String {
    format!("{}/about/lds", dnb_gnd_url(id))
}

/// Rewrites every value of `property` given as a GND URL (IRI or literal)
/// to a bare-number literal. Unparseable values are kept and reported.
pub fn standardize_gnd(g: &Graph, property: &str) -> (Graph, Vec<String>) {
    let predicate = Term::iri(property);
    let mut out = Graph::new();
    out.set_name(g.name().map(str::to_owned));
    for (p, n) in g.prefixes() {
        out.set_prefix(p.clone(), n.clone());
    }
    let mut warnings = Vec::new();
    for t in g.triples() {
        if t.predicate != predicate || t.object.is_blank() {
            out.insert(t);
            continue;
        }
        match normalize_gnd(t.object.value()) {
            Ok(id) => {
                out.insert(Triple {
                    object: Term::Literal(Literal::simple(id.as_str())),
                    ..t
                });
            }
            Err(e) => {
                warnings.push(format!("{}: {e}", t.subject));
                out.insert(t);
            }
        }
    }
    (out, warnings)
}

/// Result of [`emit_sameas`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SameAsLinks {
    pub triples: BTreeSet<Triple>,
    pub warnings: Vec<String>,
}

/// Links every local instance carrying a GND under `gnd_property` to each
/// external subject known for that GND.
pub fn emit_sameas(local: &Graph, gnd_property: &str, external: &BTreeMap<GndId, BTreeSet<String>>) -> SameAsLinks {
    let mut by_gnd: BTreeMap<GndId, BTreeSet<Term>> = BTreeMap::new();
    let mut links = SameAsLinks::default();
    for t in local.match_pattern(None, Some(&Term::iri(gnd_property)), None) {
        match normalize_gnd(t.object.value()) {
            Ok(id) => {
                by_gnd.entry(id).or_default().insert(t.subject);
            }
            Err(e) => links.warnings.push(format!("{}: {e}", t.subject)),
        }
    }
    for (id, subjects) in &by_gnd {
        let Some(targets) = external.get(id) else {
            continue;
        };
        if subjects.len() > 1 {
            let names: Vec<String> = subjects.iter().map(Term::to_string).collect();
            links.warnings.push(format!(
                "GND {id} is shared by {} local instances: {}",
                subjects.len(),
                names.join(", ")
            ));
        }
        for s in subjects {
            for target in targets {
                links.triples.insert(Triple {
                    subject: s.clone(),
                    predicate: Term::iri(ns::OWL_SAME_AS),
                    object: Term::iri(target.clone()),
                });
            }
        }
    }
    links
}

/// External subjects per GND found in fetched data: subjects with a
/// `wdt:P227` value, subjects `owl:sameAs` a GND URL, and GND URLs used as
/// subjects directly.
pub fn gnd_subjects(g: &Graph) -> BTreeMap<GndId, BTreeSet<String>> {
    let mut out: BTreeMap<GndId, BTreeSet<String>> = BTreeMap::new();
    for t in g.iter() {
        let Term::Iri(subject) = &t.subject else {
            continue;
        };
        let predicate = t.predicate.as_iri().unwrap_or_default();
        let carries_gnd = predicate == ns::WIKIDATA_P227 || (predicate == ns::OWL_SAME_AS && t.object.is_iri());
        let id = if carries_gnd {
            normalize_gnd(t.object.value()).ok()
        } else {
            None
        };
        if let Some(id) = id {
            out.entry(id).or_default().insert(subject.clone());
        }
        if subject.contains("d-nb.info/gnd/") {
            if let Ok(id) = normalize_gnd(subject) {
                let url = dnb_gnd_url(&id);
                out.entry(id).or_default().insert(url);
            }
        }
    }
    out
}

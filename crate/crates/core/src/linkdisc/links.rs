use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{cosine, tokenize_name, LinkConfig};
use crate::rdf::{ns, to_ntriples_sorted, Graph, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkStatus {
    Accepted,
    Review,
    Rejected,
}

impl LinkStatus {
    pub fn classify(score: f64, cfg: &LinkConfig) -> Self {
        if score >= cfg.accept {
            LinkStatus::Accepted
        } else if score >= cfg.review {
            LinkStatus::Review
        } else {
            LinkStatus::Rejected
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LinkStatus::Accepted => "accepted",
            LinkStatus::Review => "review",
            LinkStatus::Rejected => "rejected",
        }
    }
}

impl fmt::Display for LinkStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Best-scoring value pair for one configured property pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEvidence {
    pub source_property: String,
    pub target_property: String,
    pub source_value: Option<String>,
    pub target_value: Option<String>,
    pub source_tokens: BTreeSet<String>,
    pub target_tokens: BTreeSet<String>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkCandidate {
    pub source: String,
    pub target: String,
    pub score: f64,
    /// One entry per configured property pair, in configuration order.
    pub evidence: Vec<PairEvidence>,
    pub status: LinkStatus,
}

impl LinkCandidate {
    /// The first property pair reaching the candidate's score.
    pub fn best(&self) -> Option<&PairEvidence> {
        self.evidence.iter().find(|e| e.score == self.score)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Blocking {
    /// Score every instance pair.
    #[default]
    AllPairs,
    /// Only score pairs sharing at least one token across compared values.
    /// Loses nothing when the review threshold is above zero.
    SharedToken,
}

struct Instance {
    iri: String,
    /// Property IRI to (value, tokens) for every literal value.
    values: BTreeMap<String, Vec<(String, BTreeSet<String>)>>,
    all_tokens: BTreeSet<String>,
}

fn collect_instances<'a>(
    g: &Graph,
    class: Option<&str>,
    properties: impl Iterator<Item = &'a String> + Clone,
) -> Vec<Instance> {
    let subjects: BTreeSet<String> = match class {
        Some(c) => g
            .subjects(&Term::iri(ns::RDF_TYPE), &Term::iri(c))
            .into_iter()
            .filter_map(|t| t.as_iri().map(str::to_owned))
            .collect(),
        None => properties
            .clone()
            .flat_map(|p| g.match_pattern(None, Some(&Term::iri(p.clone())), None))
            .filter_map(|t| t.subject.as_iri().map(str::to_owned))
            .collect(),
    };
    subjects
        .into_iter()
        .map(|iri| {
            let subject = Term::iri(iri.clone());
            let mut values = BTreeMap::new();
            let mut all_tokens = BTreeSet::new();
            for p in properties.clone() {
                let vals: Vec<(String, BTreeSet<String>)> = g
                    .objects(&subject, &Term::iri(p.clone()))
                    .iter()
                    .filter_map(Term::as_literal)
                    .map(|l| (l.lexical().to_owned(), tokenize_name(l.lexical())))
                    .collect();
                for (_, tokens) in &vals {
                    all_tokens.extend(tokens.iter().cloned());
                }
                values.insert(p.clone(), vals);
            }
            Instance {
                iri,
                values,
                all_tokens,
            }
        })
        .collect()
}

fn score_pair(a: &Instance, b: &Instance, cfg: &LinkConfig) -> (f64, Vec<PairEvidence>) {
    let mut best = 0.0f64;
    let mut evidence = Vec::with_capacity(cfg.pairs.len());
    for (sp, tp) in &cfg.pairs {
        let empty = Vec::new();
        let sv = a.values.get(sp).unwrap_or(&empty);
        let tv = b.values.get(tp).unwrap_or(&empty);
        let mut e = PairEvidence {
            source_property: sp.clone(),
            target_property: tp.clone(),
            source_value: sv.first().map(|v| v.0.clone()),
            target_value: tv.first().map(|v| v.0.clone()),
            source_tokens: sv.first().map(|v| v.1.clone()).unwrap_or_default(),
            target_tokens: tv.first().map(|v| v.1.clone()).unwrap_or_default(),
            score: 0.0,
        };
        for (s_val, s_tok) in sv {
            for (t_val, t_tok) in tv {
                let c = cosine(s_tok, t_tok);
                if c > e.score {
                    e.score = c;
                    e.source_value = Some(s_val.clone());
                    e.target_value = Some(t_val.clone());
                    e.source_tokens = s_tok.clone();
                    e.target_tokens = t_tok.clone();
                }
            }
        }
        best = best.max(e.score);
        evidence.push(e);
    }
    (best, evidence)
}

fn candidate_order(a: &LinkCandidate, b: &LinkCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.source.cmp(&b.source))
        .then_with(|| a.target.cmp(&b.target))
}

pub fn find_links(ga: &Graph, gb: &Graph, cfg: &LinkConfig) -> Vec<LinkCandidate> {
    find_links_with(ga, gb, cfg, Blocking::AllPairs)
}

/// Scores instance pairs as the maximum cosine over the configured property
/// pairs and keeps those at or above the review threshold, best first.
pub fn find_links_with(ga: &Graph, gb: &Graph, cfg: &LinkConfig, blocking: Blocking) -> Vec<LinkCandidate> {
    let left = collect_instances(ga, cfg.source_class.as_deref(), cfg.pairs.iter().map(|p| &p.0));
    let right = collect_instances(gb, cfg.target_class.as_deref(), cfg.pairs.iter().map(|p| &p.1));

    let mut index: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    if blocking == Blocking::SharedToken {
        for (i, inst) in right.iter().enumerate() {
            for t in &inst.all_tokens {
                index.entry(t.as_str()).or_default().push(i);
            }
        }
    }

    let mut out = Vec::new();
    for a in &left {
        let targets: Vec<usize> = match blocking {
            Blocking::AllPairs => (0..right.len()).collect(),
            Blocking::SharedToken if cfg.review <= 0.0 => (0..right.len()).collect(),
            Blocking::SharedToken => {
                let set: BTreeSet<usize> = a
                    .all_tokens
                    .iter()
                    .filter_map(|t| index.get(t.as_str()))
                    .flatten()
                    .copied()
                    .collect();
                set.into_iter().collect()
            }
        };
        for j in targets {
            let b = &right[j];
            let (score, evidence) = score_pair(a, b, cfg);
            if score < cfg.review {
                continue;
            }
            out.push(LinkCandidate {
                source: a.iri.clone(),
                target: b.iri.clone(),
                score,
                evidence,
                status: LinkStatus::classify(score, cfg),
            });
        }
    }
    out.sort_by(candidate_order);
    out
}

fn joined_values(c: &LinkCandidate, source: bool) -> String {
    let mut seen = BTreeSet::new();
    let mut parts = Vec::new();
    for e in &c.evidence {
        let (p, v) = if source {
            (&e.source_property, &e.source_value)
        } else {
            (&e.target_property, &e.target_value)
        };
        if let Some(v) = v {
            if seen.insert((p, v)) {
                parts.push(format!("{}={v}", ns::local_name(p)));
            }
        }
    }
    parts.join("; ")
}

/// One row per candidate: both IRIs, score, status, the deciding property
/// pair, and the compared values of each side.
pub fn emit_review_report(candidates: &[LinkCandidate]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "source",
        "target",
        "score",
        "status",
        "source-property",
        "target-property",
        "source-values",
        "target-values",
    ])
    .expect("in-memory write");
    for c in candidates {
        let best = c.best();
        w.write_record([
            c.source.clone(),
            c.target.clone(),
            c.score.to_string(),
            c.status.to_string(),
            best.map(|b| b.source_property.clone()).unwrap_or_default(),
            best.map(|b| b.target_property.clone()).unwrap_or_default(),
            joined_values(c, true),
            joined_values(c, false),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// `owl:sameAs` statements for accepted candidates, sorted N-Triples.
pub fn emit_sameas_ntriples(candidates: &[LinkCandidate]) -> String {
    let triples: Vec<Triple> = candidates
        .iter()
        .filter(|c| c.status == LinkStatus::Accepted)
        .map(|c| Triple::iri(&c.source, ns::OWL_SAME_AS, Term::iri(c.target.clone())))
        .collect();
    to_ntriples_sorted(&triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn bundled() -> LinkConfig {
        LinkConfig::from_toml(fixtures::LINK_CONFIG).unwrap()
    }

    #[test]
    fn person_pair_links_at_two_over_root_six() {
        let a = fixtures::graph(fixtures::PERSON_LEIPZIG);
        let b = fixtures::graph(fixtures::PERSON_HELMSTEDT);
        let links = find_links(&a, &b, &bundled());
        assert_eq!(links.len(), 1);
        let c = &links[0];
        assert_eq!(c.source, format!("{}heinrichmatthiasheinrichs", ns::LEIPZIG));
        assert_eq!(c.target, format!("{}13084", ns::HELMSTEDT));
        assert_eq!(c.score.to_string(), "0.8164965809277261");
        assert_eq!(c.status, LinkStatus::Accepted);
        let best = c.best().unwrap();
        assert_eq!(best.source_property, format!("{}forename", ns::LEIPZIG));
        assert_eq!(best.target_property, ns::RDFS_LABEL);
    }

    #[test]
    fn no_exact_matches_in_catalogues() {
        let a = fixtures::graph(fixtures::LEIPZIG_CATALOGUE);
        let b = fixtures::graph(fixtures::HELMSTEDT_CATALOGUE);
        let mut cfg = bundled().with_classes(format!("{}Person", ns::LEIPZIG), format!("{}Person", ns::HELMSTEDT));
        cfg.accept = 1.0;
        cfg.review = 0.5;
        let links = find_links(&a, &b, &cfg);
        assert!(links.iter().all(|c| c.status != LinkStatus::Accepted));
        assert_eq!(links.len(), 3);
    }

    #[test]
    fn typed_instances_only_when_classes_are_set() {
        let a = fixtures::graph(fixtures::LEIPZIG_CATALOGUE);
        let b = fixtures::graph(fixtures::HELMSTEDT_CATALOGUE);
        let cfg = bundled().with_classes(format!("{}Person", ns::LEIPZIG), format!("{}Person", ns::HELMSTEDT));
        let links = find_links(&a, &b, &cfg);
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].status, LinkStatus::Accepted);
        assert!(find_links(&Graph::new(), &b, &cfg).is_empty());
    }

    #[test]
    fn shared_token_blocking_is_lossless() {
        let a = fixtures::graph(fixtures::LEIPZIG_CATALOGUE);
        let b = fixtures::graph(fixtures::HELMSTEDT_CATALOGUE);
        let mut cfg = bundled();
        cfg.review = 0.1;
        assert_eq!(
            find_links(&a, &b, &cfg),
            find_links_with(&a, &b, &cfg, Blocking::SharedToken)
        );
    }

    #[test]
    fn report_rows() {
        assert_eq!(
            emit_review_report(&[]),
            "source,target,score,status,source-property,target-property,source-values,target-values\n"
        );
        let a = fixtures::graph(fixtures::PERSON_LEIPZIG);
        let b = fixtures::graph(fixtures::PERSON_HELMSTEDT);
        let report = emit_review_report(&find_links(&a, &b, &bundled()));
        let rows: Vec<&str> = report.lines().collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[1].contains(",0.8164965809277261,accepted,"), "{}", rows[1]);
        assert!(rows[1].contains("forename=Heinrich Matthias"), "{}", rows[1]);
    }

    #[test]
    fn sameas_output() {
        let a = fixtures::graph(fixtures::PERSON_LEIPZIG);
        let b = fixtures::graph(fixtures::PERSON_HELMSTEDT);
        let nt = emit_sameas_ntriples(&find_links(&a, &b, &bundled()));
        assert_eq!(
            nt,
            "<http://purl.org/pcp-on-web/leipzig#heinrichmatthiasheinrichs> <http://www.w3.org/2002/07/owl#sameAs> <http://purl.org/pcp-on-web/helmstedt#13084> .\n"
        );
    }
}

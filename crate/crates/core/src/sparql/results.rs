use std::collections::BTreeMap;

use crate::rdf::{ns, Term};

/// Tabular query outcome. Every row has `header.len()` cells; `None` is unbound.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// RFC 4180 CSV in the SPARQL CSV results shape: IRIs and literals as
    /// plain values, blank nodes as `_:label`, unbound cells empty.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                None => String::new(),
                Some(Term::Blank(b)) => format!("_:{b}"),
                Some(t) => t.value().to_owned(),
            }))
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// Left-aligned text table; IRIs are compacted with `prefixes` where possible.
    pub fn to_text_table(&self, prefixes: &BTreeMap<String, String>) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.as_ref().map_or_else(String::new, |t| compact(t, prefixes)))
                    .collect()
            })
            .collect();
        let header: Vec<String> = self.header.iter().map(|h| format!("?{h}")).collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |row: &[String]| {
            let text: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(text.join(" | ").trim_end());
            out.push('\n');
        };
        line(&header);
        line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
        for row in &cells {
            line(row);
        }
        out
    }
}

fn compact_iri(iri: &str, prefixes: &BTreeMap<String, String>) -> String {
    prefixes
        .iter()
        .filter(|(_, ns)| iri.starts_with(ns.as_str()))
        .filter(|(_, ns)| {
            iri[ns.len()..]
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-'))
        })
        .max_by_key(|(_, ns)| ns.len())
        .map(|(p, ns)| format!("{p}:{}", &iri[ns.len()..]))
        .unwrap_or_else(|| format!("<{iri}>"))
}

fn compact(term: &Term, prefixes: &BTreeMap<String, String>) -> String {
    match term {
        Term::Iri(iri) => compact_iri(iri, prefixes),
        Term::Literal(lit) if lit.datatype() == Some(ns::XSD_INTEGER) => lit.lexical().to_owned(),
        Term::Literal(lit) => match (lit.language(), lit.datatype()) {
            (Some(lang), _) => format!("{:?}@{lang}", lit.lexical()),
            (None, Some(dt)) => format!("{:?}^^{}", lit.lexical(), compact_iri(dt, prefixes)),
            (None, None) => format!("{:?}", lit.lexical()),
        },
        Term::Blank(b) => format!("_:{b}"),
    }
}

use std::collections::BTreeSet;
use std::fmt;

use super::vocab::extract_vocabulary;
use crate::rdf::{ns, Graph, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LintKind {
    MissingLabel,
    MissingDescription,
    MultilingualLabel,
    NamingPattern,
    LanguageMissing,
}

impl LintKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LintKind::MissingLabel => "missing-label",
            LintKind::MissingDescription => "missing-description",
            LintKind::MultilingualLabel => "multilingual-label",
            LintKind::NamingPattern => "naming-pattern",
            LintKind::LanguageMissing => "language-missing",
        }
    }
}

impl fmt::Display for LintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LintIssue {
    pub subject: String,
    pub kind: LintKind,
    pub detail: String,
    /// Only naming-pattern issues carry a suggestion.
    pub suggested_fix: Option<String>,
}

/// Checks every non-W3C vocabulary term for labels, descriptions, label
/// languages and naming conventions. Issues are sorted by subject, then kind.
pub fn lint_vocabulary(g: &Graph, required_languages: &[&str]) -> Vec<LintIssue> {
    let vocab = extract_vocabulary(g);
    let label = Term::iri(ns::RDFS_LABEL);
    let comment = Term::iri(ns::RDFS_COMMENT);
    let mut issues = Vec::new();
    let mut push = |subject: &str, kind, detail: String, fix: Option<String>| {
        issues.push(LintIssue {
            subject: subject.to_owned(),
            kind,
            detail,
            suggested_fix: fix,
        })
    };

    let terms = vocab
        .properties
        .iter()
        .map(|p| (p, false))
        .chain(vocab.classes.iter().map(|c| (c, true)));
    for (iri, is_class) in terms {
        if ns::is_w3c_meta(iri) {
            continue;
        }
        let subject = Term::iri(iri.clone());
        let labels = g.objects(&subject, &label);
        let comments = g.objects(&subject, &comment);

        if labels.is_empty() {
            push(iri, LintKind::MissingLabel, "no rdfs:label".into(), None);
        }
        if comments.is_empty() {
            push(iri, LintKind::MissingDescription, "no rdfs:comment".into(), None);
        }

        let mut multilingual = false;
        for l in labels.iter().filter_map(Term::as_literal) {
            if l.lexical().contains(['/', '|']) {
                multilingual = true;
                push(
                    iri,
                    LintKind::MultilingualLabel,
                    format!("label {:?} mixes languages in one literal", l.lexical()),
                    None,
                );
            }
        }
        for (what, values, skip) in [("label", &labels, multilingual), ("description", &comments, false)] {
            if values.is_empty() || skip {
                continue;
            }
            let present: BTreeSet<&str> = values
                .iter()
                .filter_map(Term::as_literal)
                .filter_map(|l| l.language())
                .collect();
            for lang in required_languages {
                if !present.contains(lang) {
                    push(iri, LintKind::LanguageMissing, format!("no {what} in @{lang}"), None);
                }
            }
        }

        let local = ns::local_name(iri);
        if !follows_convention(local, is_class) {
            let expected = if is_class { "UpperCamelCase" } else { "lowerCamelCase" };
            let fix = suggest_name(local, is_class).filter(|s| s != local);
            push(
                iri,
                LintKind::NamingPattern,
                format!("`{local}` is not {expected}"),
                fix,
            );
        }
    }
    issues.sort();
    issues
}

fn follows_convention(local: &str, is_class: bool) -> bool {
    let mut chars = local.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    let head_ok = if is_class {
        first.is_ascii_uppercase()
    } else {
        first.is_ascii_lowercase()
    };
    head_ok && chars.all(|c| c.is_ascii_alphanumeric())
}

/// Language qualifiers that read better as a leading adjective.
const QUALIFIERS: &[(&str, &str)] = &[
    ("lat", "latin"),
    ("latin", "latin"),
    ("de", "german"),
    ("ger", "german"),
    ("german", "german"),
    ("en", "english"),
    ("eng", "english"),
    ("english", "english"),
    ("gr", "greek"),
    ("grc", "greek"),
    ("greek", "greek"),
];

fn split_words(local: &str) -> Vec<String> {
    let mut words = Vec::new();
    for part in local.split(|c: char| !c.is_ascii_alphanumeric()) {
        let mut current = String::new();
        for c in part.chars() {
            if c.is_ascii_uppercase() && !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            current.push(c.to_ascii_lowercase());
        }
        if !current.is_empty() {
            words.push(current);
        }
    }
    words
}

/// Heuristic rename: trailing language qualifiers move to the front, then
/// the words are camel-cased. `surname_lat` becomes `latinSurname`.
pub fn suggest_name(local: &str, is_class: bool) -> Option<String> {
    let words = split_words(local);
    if words.is_empty() {
        return None;
    }
    let mut qualifiers = Vec::new();
    let mut ordered = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let qualifier = QUALIFIERS.iter().find(|(k, _)| k == w).map(|(_, v)| *v);
        match qualifier {
            Some(q) if i > 0 => qualifiers.push(q.to_owned()),
            _ => ordered.push(w.clone()),
        }
    }
    qualifiers.extend(ordered);
    let mut out = String::new();
    for (i, w) in qualifiers.iter().enumerate() {
        let mut chars = w.chars();
        let first = chars.next()?;
        if i == 0 && !is_class {
            out.push(first.to_ascii_lowercase());
        } else {
            out.push(first.to_ascii_uppercase());
        }
        out.extend(chars);
    }
    if !out.starts_with(|c: char| c.is_ascii_alphabetic()) {
        return None;
    }
    Some(out)
}

/// CSV with columns `subject,kind,detail,suggested-fix`.
pub fn lint_report_csv(issues: &[LintIssue]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["subject", "kind", "detail", "suggested-fix"])
        .expect("in-memory write");
    for i in issues {
        w.write_record([
            i.subject.as_str(),
            i.kind.as_str(),
            i.detail.as_str(),
            i.suggested_fix.as_deref().unwrap_or(""),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const LANGS: &[&str] = &["de", "en"];

    fn pcp(local: &str) -> String {
        format!("{}{local}", ns::PCP)
    }

    #[test]
    fn clean_ontology_has_no_issues() {
        let issues = lint_vocabulary(&fixtures::graph(fixtures::ONTOLOGY_CLEAN), LANGS);
        assert_eq!(issues, []);
    }

    #[test]
    fn issue_fixture_yields_expected_kinds() {
        let issues = lint_vocabulary(&fixtures::graph(fixtures::ONTOLOGY_ISSUES), LANGS);
        let got: Vec<(String, &str, Option<&str>)> = issues
            .iter()
            .map(|i| (i.subject.clone(), i.kind.as_str(), i.suggested_fix.as_deref()))
            .collect();
        assert_eq!(
            got,
            [
                (pcp("Enrollment"), "missing-label", None),
                (pcp("Enrollment"), "missing-description", None),
                (pcp("hasMatrikel"), "multilingual-label", None),
                (pcp("religion"), "language-missing", None),
                (pcp("studentGroup"), "naming-pattern", Some("StudentGroup")),
                (pcp("surname_lat"), "naming-pattern", Some("latinSurname")),
            ]
        );
        let religion = issues.iter().find(|i| i.subject == pcp("religion")).unwrap();
        assert_eq!(religion.detail, "no label in @en");
    }

    #[test]
    fn suggestions() {
        assert_eq!(suggest_name("surname_lat", false).as_deref(), Some("latinSurname"));
        assert_eq!(suggest_name("forename_ger", false).as_deref(), Some("germanForename"));
        assert_eq!(suggest_name("student_group", true).as_deref(), Some("StudentGroup"));
        assert_eq!(suggest_name("Has_Period", false).as_deref(), Some("hasPeriod"));
        assert_eq!(suggest_name("_", false), None);
    }

    #[test]
    fn untagged_label_misses_every_language() {
        let g = crate::rdf::parse_turtle(
            "<http://x/p> <http://x/p> 1 .\n<http://x/p> <http://www.w3.org/2000/01/rdf-schema#label> \"p\" ; <http://www.w3.org/2000/01/rdf-schema#comment> \"c\"@de, \"c\"@en .",
            None,
        )
        .unwrap();
        let kinds: Vec<_> = lint_vocabulary(&g, LANGS).into_iter().map(|i| i.detail).collect();
        assert_eq!(kinds, ["no label in @de", "no label in @en"]);
    }

    #[test]
    fn csv_report() {
        let issues = lint_vocabulary(&fixtures::graph(fixtures::ONTOLOGY_ISSUES), LANGS);
        let csv = lint_report_csv(&issues);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("subject,kind,detail,suggested-fix"));
        assert!(csv.contains("surname_lat,naming-pattern,`surname_lat` is not lowerCamelCase,latinSurname"));
        assert_eq!(lines.count(), issues.len());
    }
}

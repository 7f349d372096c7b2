use std::fmt;

use super::ns;

/// An RDF literal.
///
/// Language tags are stored lowercased so that equality is case-insensitive
/// on the tag. A `xsd:string` datatype is folded into "no datatype".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    language: Option<String>,
    datatype: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            language: None,
            datatype: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, language: &str) -> Self {
        Literal {
            lexical: lexical.into(),
            language: Some(language.to_ascii_lowercase()),
            datatype: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        let datatype = datatype.into();
        let datatype = if datatype == ns::XSD_STRING {
            None
        } else {
            Some(datatype)
        };
        Literal {
            lexical: lexical.into(),
            language: None,
            datatype,
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), ns::XSD_INTEGER)
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// The explicit datatype, `None` for simple and language-tagged literals.
    pub fn datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }

    pub fn is_numeric(&self) -> bool {
        matches!(
            self.datatype.as_deref(),
            Some(ns::XSD_INTEGER | ns::XSD_DECIMAL | ns::XSD_DOUBLE | ns::XSD_FLOAT)
                | Some(ns::XSD_INT | ns::XSD_LONG | ns::XSD_NON_NEGATIVE_INTEGER)
        )
    }
}

/// An RDF term: IRI, blank node or literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term::Iri(value.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank(label.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::simple(lexical))
    }

    pub fn lang_literal(lexical: impl Into<String>, language: &str) -> Self {
        Term::Literal(Literal::lang(lexical, language))
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal::typed(lexical, datatype))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Lexical value: the IRI text, the blank label, or the literal's lexical form.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(v) | Term::Blank(v) => v,
            Term::Literal(lit) => &lit.lexical,
        }
    }
}

/// Returns true when `iri` carries a scheme (`[A-Za-z][A-Za-z0-9+.-]*:`).
pub fn is_absolute_iri(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else {
        return false;
    };
    let scheme = &iri[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Characters that may not appear unescaped inside `<...>`.
pub(crate) fn is_illegal_iri_char(c: char) -> bool {
    matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') || c <= ' '
}

pub(crate) fn escape_literal(out: &mut String, value: &str) {
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::with_capacity(self.lexical.len() + 2);
        out.push('"');
        escape_literal(&mut out, &self.lexical);
        out.push('"');
        f.write_str(&out)?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^<{dt}>")
        } else {
            Ok(())
        }
    }
}

/// N-Triples term syntax.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Blank(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

/// An RDF statement. Construction through [`Triple::new`] checks positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TripleError {
    #[error("subject must be an IRI or blank node, got {0}")]
    LiteralSubject(Term),
    #[error("predicate must be an IRI, got {0}")]
    NonIriPredicate(Term),
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TripleError> {
        if subject.is_literal() {
            return Err(TripleError::LiteralSubject(subject));
        }
        if !predicate.is_iri() {
            return Err(TripleError::NonIriPredicate(predicate));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    /// Shorthand for the common IRI-IRI-term case.
    pub fn iri(subject: &str, predicate: &str, object: Term) -> Self {
        Triple {
            subject: Term::iri(subject),
            predicate: Term::iri(predicate),
            object,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn language_tags_compare_case_insensitively() {
        assert_eq!(Literal::lang("Nachname", "DE"), Literal::lang("Nachname", "de"));
        assert_ne!(Literal::lang("x", "de"), Literal::lang("x", "en"));
    }

    #[test]
    fn xsd_string_is_simple_literal() {
        assert_eq!(Literal::typed("a", ns::XSD_STRING), Literal::simple("a"));
    }

    #[test]
    fn lexical_forms_are_not_normalized() {
        assert_ne!(
            Literal::typed("1", ns::XSD_INTEGER),
            Literal::typed("01", ns::XSD_INTEGER)
        );
    }

    #[test]
    fn absolute_iri_detection() {
        assert!(is_absolute_iri("https://d-nb.info/gnd/118755951"));
        assert!(is_absolute_iri("urn:x"));
        assert!(!is_absolute_iri("relative/path"));
        assert!(!is_absolute_iri(":local"));
        assert!(!is_absolute_iri("1a:b"));
    }

    #[test]
    fn triple_positions_are_checked() {
        let lit = Term::literal("x");
        assert!(Triple::new(lit.clone(), Term::iri("p:x"), lit.clone()).is_err());
        assert!(Triple::new(Term::iri("s:x"), Term::blank("b"), lit.clone()).is_err());
        assert!(Triple::new(Term::blank("b"), Term::iri("p:x"), lit).is_ok());
    }

    #[test]
    fn literal_escaping() {
        let t = Term::literal("a \"quoted\"\nline\\");
        assert_eq!(t.to_string(), r#""a \"quoted\"\nline\\""#);
    }
}

//! Reader for a Turtle subset (which also covers N-Triples).
//!
//! Supported: `@prefix`/`PREFIX`, `@base`/`BASE`, IRIs, prefixed names, `a`,
//! predicate lists (`;`), object lists (`,`), quoted literals with language
//! tags or datatypes, numeric and boolean shorthands, `_:` blank node labels
//! and `#` comments. Blank node property lists, collections and quoted
//! triples are rejected.

use super::graph::Graph;
use super::ns;
use super::term::{is_absolute_iri, is_illegal_iri_char, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message} (near `{token}`)")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
        token: String,
    },
    #[error("relative IRI <{iri}> at {line}:{column} and no base IRI")]
    RelativeIri { iri: String, line: usize, column: usize },
    #[error("unsupported syntax at {line}:{column}: {construct}")]
    Unsupported {
        line: usize,
        column: usize,
        construct: &'static str,
    },
}

/// Parses a Turtle document. `base` resolves relative IRIs unless the
/// document declares its own base.
pub fn parse_turtle(text: &str, base: Option<&str>) -> Result<Graph, ParseError> {
    let mut parser = Parser {
        src: text,
        pos: 0,
        base: base.map(str::to_owned),
        graph: Graph::new(),
    };
    parser.document()?;
    Ok(parser.graph)
}

/// N-Triples is a syntactic subset of the supported Turtle.
pub fn parse_ntriples(text: &str) -> Result<Graph, ParseError> {
    parse_turtle(text, None)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    base: Option<String>,
    graph: Graph,
}

fn is_pn_chars_base(c: char) -> bool {
    c.is_ascii_alphabetic() || (!c.is_ascii() && c.is_alphabetic())
}

fn is_pn_chars(c: char) -> bool {
    is_pn_chars_base(c) || c.is_ascii_digit() || c == '_' || c == '-' || c == '\u{b7}'
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn line_col(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = self.line_col(pos);
        let token: String = self.src[pos..]
            .chars()
            .take_while(|c| !c.is_whitespace())
            .take(24)
            .collect();
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
            token: if token.is_empty() { "end of input".into() } else { token },
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn unsupported(&self, construct: &'static str) -> ParseError {
        let (line, column) = self.line_col(self.pos);
        ParseError::Unsupported {
            line,
            column,
            construct,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    /// Case-insensitive keyword followed by a non-name character.
    fn at_keyword(&self, kw: &str) -> bool {
        let rest = self.rest();
        rest.len() >= kw.len()
            && rest.is_char_boundary(kw.len())
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && !rest[kw.len()..]
                .chars()
                .next()
                .is_some_and(|c| is_pn_chars(c) || c == ':')
    }

    fn document(&mut self) -> Result<(), ParseError> {
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else {
                return Ok(());
            };
            if c == '@' {
                self.at_directive()?;
            } else if self.at_keyword("PREFIX") {
                self.pos += "PREFIX".len();
                self.prefix_body()?;
            } else if self.at_keyword("BASE") {
                self.pos += "BASE".len();
                self.base_body()?;
            } else {
                self.triples()?;
                self.expect('.')?;
            }
        }
    }

    fn at_directive(&mut self) -> Result<(), ParseError> {
        let start = self.pos;
        self.bump();
        if self.at_keyword("prefix") {
            self.pos += "prefix".len();
            self.prefix_body()?;
        } else if self.at_keyword("base") {
            self.pos += "base".len();
            self.base_body()?;
        } else {
            return Err(self.error_at(start, "unknown directive"));
        }
        self.expect('.')
    }

    fn prefix_body(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let prefix = self.pn_prefix();
        if self.peek() != Some(':') {
            return Err(self.error_at(start, "expected prefix name ending in `:`"));
        }
        self.bump();
        self.skip_ws();
        let ns = self.iri_ref()?;
        self.graph.set_prefix(prefix, ns);
        Ok(())
    }

    fn base_body(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), ParseError> {
        let subject = self.subject()?;
        loop {
            self.skip_ws();
            let predicate = self.verb()?;
            loop {
                self.skip_ws();
                let object = self.object()?;
                self.graph.insert(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                } else {
                    break;
                }
            }
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | None) {
                return Ok(());
            }
        }
    }

    fn subject(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('_') if self.peek_at(1) == Some(':') => self.blank(),
            Some('[') => Err(self.unsupported("blank node property list")),
            Some('(') => Err(self.unsupported("collection")),
            Some('"' | '\'') => Err(self.error("literal in subject position")),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => Err(self.error("literal in subject position")),
            _ => self.iri(),
        }
    }

    fn verb(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some('a') && !self.peek_at(1).is_some_and(|c| is_pn_chars(c) || c == ':' || c == '.') {
            self.bump();
            return Ok(Term::iri(ns::RDF_TYPE));
        }
        if self.peek() == Some('_') && self.peek_at(1) == Some(':') {
            return Err(self.error("blank node in predicate position"));
        }
        self.iri()
    }

    fn object(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('_') if self.peek_at(1) == Some(':') => self.blank(),
            Some('[') => Err(self.unsupported("blank node property list")),
            Some('(') => Err(self.unsupported("collection")),
            Some('"' | '\'') => self.literal(),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => self.number(),
            Some('.') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => self.number(),
            _ if self.at_keyword("true") => {
                self.pos += 4;
                Ok(Term::typed_literal("true", ns::XSD_BOOLEAN))
            }
            _ if self.at_keyword("false") => {
                self.pos += 5;
                Ok(Term::typed_literal("false", ns::XSD_BOOLEAN))
            }
            _ => self.iri(),
        }
    }

    fn iri(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('<') if self.peek_at(1) == Some('<') => Err(self.unsupported("quoted triple")),
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some(c) if is_pn_chars_base(c) || c == ':' => self.prefixed_name(),
            _ => Err(self.error("expected IRI")),
        }
    }

    fn iri_ref(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        if self.bump() != Some('<') {
            return Err(self.error_at(start, "expected `<`"));
        }
        let mut iri = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated IRI")),
                Some('>') => break,
                Some('\\') => iri.push(self.unicode_escape()?),
                Some(c) if is_illegal_iri_char(c) => {
                    return Err(self.error_at(start, format!("illegal character {c:?} in IRI")))
                }
                Some(c) => iri.push(c),
            }
        }
        self.resolve(iri, start)
    }

    fn resolve(&self, iri: String, at: usize) -> Result<String, ParseError> {
        if is_absolute_iri(&iri) {
            return Ok(iri);
        }
        let relative_err = || {
            let (line, column) = self.line_col(at);
            ParseError::RelativeIri {
                iri: iri.clone(),
                line,
                column,
            }
        };
        let base = self.base.as_deref().ok_or_else(relative_err)?;
        let base = url::Url::parse(base).map_err(|_| relative_err())?;
        base.join(&iri).map(String::from).map_err(|_| relative_err())
    }

    fn unicode_escape(&mut self) -> Result<char, ParseError> {
        let start = self.pos;
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error_at(start, "invalid escape")),
        };
        let hex = self
            .rest()
            .get(..len)
            .ok_or_else(|| self.error_at(start, "truncated unicode escape"))?;
        let c = u32::from_str_radix(hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error_at(start, "invalid unicode escape"))?;
        self.pos += len;
        Ok(c)
    }

    fn pn_prefix(&mut self) -> String {
        let mut out = String::new();
        if self.peek().is_some_and(is_pn_chars_base) {
            while let Some(c) = self.peek() {
                if is_pn_chars(c) || (c == '.' && self.peek_at(1).is_some_and(is_pn_chars)) {
                    out.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
        }
        out
    }

    fn prefixed_name(&mut self) -> Result<Term, ParseError> {
        let start = self.pos;
        let prefix = self.pn_prefix();
        if self.peek() != Some(':') {
            return Err(self.error_at(start, "expected prefixed name"));
        }
        self.bump();
        let local = self.pn_local()?;
        let ns = self
            .graph
            .prefixes()
            .get(&prefix)
            .ok_or_else(|| self.error_at(start, format!("undeclared prefix `{prefix}:`")))?;
        Ok(Term::Iri(format!("{ns}{local}")))
    }

    fn pn_local(&mut self) -> Result<String, ParseError> {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            match c {
                c if is_pn_chars(c) || c == ':' => {
                    out.push(c);
                    self.bump();
                }
                '.' if self
                    .peek_at(1)
                    .is_some_and(|n| is_pn_chars(n) || matches!(n, ':' | '%' | '\\' | '.')) =>
                {
                    // a dot may not end a local name
                    let mut ahead = self.rest().chars().skip(1);
                    let continues = loop {
                        match ahead.next() {
                            Some('.') => continue,
                            Some(n) => break is_pn_chars(n) || matches!(n, ':' | '%' | '\\'),
                            None => break false,
                        }
                    };
                    if !continues {
                        break;
                    }
                    out.push('.');
                    self.bump();
                }
                '%' => {
                    let hex = self.rest().get(1..3).unwrap_or("");
                    if hex.len() != 2 || !hex.chars().all(|h| h.is_ascii_hexdigit()) {
                        return Err(self.error("invalid percent escape in local name"));
                    }
                    out.push('%');
                    out.push_str(hex);
                    self.pos += 3;
                }
                '\\' => {
                    let esc = self.peek_at(1);
                    match esc {
                        Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                            out.push(e);
                            self.pos += 1 + e.len_utf8();
                        }
                        _ => return Err(self.error("invalid escape in local name")),
                    }
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<Term, ParseError> {
        let start = self.pos;
        self.pos += 2;
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || (c == '.' && self.peek_at(1).is_some_and(is_pn_chars)) {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if label.is_empty() {
            return Err(self.error_at(start, "empty blank node label"));
        }
        Ok(Term::Blank(label))
    }

    fn literal(&mut self) -> Result<Term, ParseError> {
        let lexical = self.string()?;
        match self.peek() {
            Some('@') => {
                let start = self.pos;
                self.bump();
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || (c == '-' && !tag.is_empty()) {
                        tag.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err(self.error_at(start, "invalid language tag"));
                }
                Ok(Term::Literal(Literal::lang(lexical, &tag)))
            }
            Some('^') if self.peek_at(1) == Some('^') => {
                self.pos += 2;
                let dt = self.iri()?;
                let Term::Iri(dt) = dt else { unreachable!() };
                if dt == ns::RDF_LANG_STRING {
                    return Err(self.error("rdf:langString literal without language tag"));
                }
                Ok(Term::Literal(Literal::typed(lexical, dt)))
            }
            _ => Ok(Term::Literal(Literal::simple(lexical))),
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let quote = self.bump().expect("caller checked quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.pos += 2;
        }
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(self.error_at(start, "unterminated string"));
            };
            match c {
                c if c == quote => {
                    if !long {
                        return Ok(out);
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.pos += 2;
                        // a long string may end with up to two extra quotes
                        while self.peek() == Some(quote) {
                            out.push(quote);
                            self.bump();
                        }
                        return Ok(out);
                    }
                    out.push(c);
                }
                '\\' => {
                    let esc_start = self.pos;
                    match self.peek() {
                        Some('u' | 'U') => out.push(self.unicode_escape()?),
                        Some(e) => {
                            self.bump();
                            out.push(match e {
                                't' => '\t',
                                'b' => '\u{8}',
                                'n' => '\n',
                                'r' => '\r',
                                'f' => '\u{c}',
                                '"' => '"',
                                '\'' => '\'',
                                '\\' => '\\',
                                _ => return Err(self.error_at(esc_start, "invalid string escape")),
                            });
                        }
                        None => return Err(self.error_at(start, "unterminated string")),
                    }
                }
                '\n' | '\r' if !long => {
                    return Err(self.error_at(start, "line break in short string"));
                }
                c => out.push(c),
            }
        }
    }

    fn number(&mut self) -> Result<Term, ParseError> {
        let start = self.pos;
        let mut text = String::new();
        if let Some(sign @ ('+' | '-')) = self.peek() {
            text.push(sign);
            self.bump();
        }
        let digits = |p: &mut Self, text: &mut String| {
            let mut n = 0;
            while let Some(c) = p.peek().filter(char::is_ascii_digit) {
                text.push(c);
                p.bump();
                n += 1;
            }
            n
        };
        let int_digits = digits(self, &mut text);
        let mut datatype = ns::XSD_INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.bump();
            digits(self, &mut text);
            datatype = ns::XSD_DECIMAL;
        } else if int_digits == 0 {
            return Err(self.error_at(start, "invalid number"));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            text.push(e);
            self.bump();
            if let Some(sign @ ('+' | '-')) = self.peek() {
                text.push(sign);
                self.bump();
            }
            if digits(self, &mut text) == 0 {
                return Err(self.error_at(start, "invalid exponent"));
            }
            datatype = ns::XSD_DOUBLE;
        }
        Ok(Term::typed_literal(text, datatype))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PERSON_RECORD: &str = r#"
@prefix leipzig: <http://purl.org/pcp-on-web/leipzig#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
leipzig:heinrichmatthiasheinrichs leipzig:surname "Heinrichs" ; leipzig:forename "Heinrich Matthias" ; rdfs:label "Heinrich Matthias Heinrichs" .
"#;

    #[test]
    fn empty_document() {
        assert!(parse_turtle("", None).unwrap().is_empty());
        assert!(parse_turtle("  # only a comment\n", None).unwrap().is_empty());
    }

    #[test]
    fn predicate_list_yields_one_subject() {
        let g = parse_turtle(PERSON_RECORD, None).unwrap();
        assert_eq!(g.len(), 3);
        let subjects: std::collections::BTreeSet<_> = g.triples().into_iter().map(|t| t.subject).collect();
        assert_eq!(subjects.len(), 1);
        assert_eq!(
            g.prefixes().get("leipzig").map(String::as_str),
            Some("http://purl.org/pcp-on-web/leipzig#")
        );
    }

    #[test]
    fn object_lists_and_a() {
        let g = parse_turtle(
            "PREFIX ex: <http://ex.org/>\nex:s a ex:C ; ex:p ex:o1 , ex:o2 ; .",
            None,
        )
        .unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.contains(&Triple::iri(
            "http://ex.org/s",
            ns::RDF_TYPE,
            Term::iri("http://ex.org/C")
        )));
    }

    #[test]
    fn literal_forms() {
        let g = parse_turtle(
            r#"@prefix ex: <http://ex.org/> .
ex:s ex:p "Nachname"@DE , 'single' , """long "quoted"
text""" , "1702-03-01"^^<http://www.w3.org/2001/XMLSchema#date> , 42 , -1.5 , 2e3 , true ."#,
            None,
        )
        .unwrap();
        let objs: Vec<Term> = g.triples().into_iter().map(|t| t.object).collect();
        assert!(objs.contains(&Term::lang_literal("Nachname", "de")));
        assert!(objs.contains(&Term::literal("single")));
        assert!(objs.contains(&Term::literal("long \"quoted\"\ntext")));
        assert!(objs.contains(&Term::typed_literal("1702-03-01", ns::XSD_DATE)));
        assert!(objs.contains(&Term::typed_literal("42", ns::XSD_INTEGER)));
        assert!(objs.contains(&Term::typed_literal("-1.5", ns::XSD_DECIMAL)));
        assert!(objs.contains(&Term::typed_literal("2e3", ns::XSD_DOUBLE)));
        assert!(objs.contains(&Term::typed_literal("true", ns::XSD_BOOLEAN)));
    }

    #[test]
    fn local_names_starting_with_digits_and_trailing_dot() {
        let g = parse_turtle("@prefix h: <http://h.org/> .\nh:13084 h:p h:x.y.", None).unwrap();
        assert!(g.contains(&Triple::iri(
            "http://h.org/13084",
            "http://h.org/p",
            Term::iri("http://h.org/x.y")
        )));
    }

    #[test]
    fn relative_iri_needs_base() {
        let err = parse_turtle("<s> <http://p> <o> .", None).unwrap_err();
        assert!(matches!(err, ParseError::RelativeIri { line: 1, column: 1, .. }));
        let g = parse_turtle("<s> <http://p> <o> .", Some("http://base.org/dir/")).unwrap();
        assert!(g.contains(&Triple::iri(
            "http://base.org/dir/s",
            "http://p",
            Term::iri("http://base.org/dir/o")
        )));
        let g = parse_turtle("@base <http://b.org/> . <s> <p> <#o> .", None).unwrap();
        assert!(g.contains(&Triple::iri(
            "http://b.org/s",
            "http://b.org/p",
            Term::iri("http://b.org/#o")
        )));
    }

    #[test]
    fn syntax_error_reports_position_and_token() {
        let err = parse_turtle("<http://s> <http://p>\n  <http://o> junk .", None).unwrap_err();
        match err {
            ParseError::Syntax {
                line, column, token, ..
            } => {
                assert_eq!((line, column), (2, 14));
                assert_eq!(token, "junk");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_prefix_is_an_error() {
        let err = parse_turtle("x:a x:b x:c .", None).unwrap_err();
        assert!(err.to_string().contains("undeclared prefix `x:`"), "{err}");
    }

    #[test]
    fn unsupported_constructs_are_rejected() {
        for (doc, what) in [
            ("<http://s> <http://p> [ <http://q> 1 ] .", "blank node property list"),
            ("<http://s> <http://p> ( 1 2 ) .", "collection"),
            ("<< <http://a> <http://b> <http://c> >> <http://p> 1 .", "quoted triple"),
        ] {
            match parse_turtle(doc, None) {
                Err(ParseError::Unsupported { construct, .. }) => assert_eq!(construct, what),
                other => panic!("{doc}: {other:?}"),
            }
        }
    }

    #[test]
    fn blank_nodes_and_escapes() {
        let g = parse_ntriples("_:b1 <http://p> \"caf\\u00E9\\t\" .\n<http://s> <http://p> _:b1 .\n").unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.contains(&Triple {
            subject: Term::blank("b1"),
            predicate: Term::iri("http://p"),
            object: Term::literal("café\t"),
        }));
    }

    #[test]
    fn literal_subject_rejected() {
        assert!(parse_turtle("\"x\" <http://p> <http://o> .", None).is_err());
    }
}

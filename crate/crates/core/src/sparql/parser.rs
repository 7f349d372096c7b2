//! Tokenizer and recursive-descent parser for the supported SELECT subset.

use std::collections::BTreeMap;

use super::ast::{Bind, Expression, OrderKey, Projection, Query, SortDirection, TriplePattern, VarOrTerm};
use super::QueryError;
use crate::rdf::{is_absolute_iri, ns, Literal, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    IriRef(String),
    PName(String, String),
    Str(String),
    LangTag(String),
    DoubleCaret,
    Number(String, &'static str),
    Word(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    pos: usize,
}

const UNSUPPORTED_WORDS: &[&str] = &[
    "OPTIONAL",
    "FILTER",
    "UNION",
    "MINUS",
    "SERVICE",
    "GRAPH",
    "VALUES",
    "EXISTS",
    "HAVING",
    "OFFSET",
    "DISTINCT",
    "REDUCED",
    "FROM",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "INSERT",
    "DELETE",
    "LOAD",
    "CLEAR",
    "DROP",
    "CREATE",
    "WITH",
    "SUM",
    "AVG",
    "MIN",
    "MAX",
    "SAMPLE",
    "GROUP_CONCAT",
];

fn line_col(src: &str, pos: usize) -> (usize, usize) {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax(src: &str, pos: usize, message: impl Into<String>) -> QueryError {
    let (line, column) = line_col(src, pos);
    QueryError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn tokenize(src: &str) -> Result<Vec<Spanned>, QueryError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let at = |i: usize| chars.get(i).map(|&(_, c)| c);
    let pos_of = |i: usize| chars.get(i).map_or(src.len(), |&(p, _)| p);
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = match c {
            '?' | '$' => {
                i += 1;
                let start = i;
                while at(i).is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    i += 1;
                }
                if start == i {
                    return Err(syntax(src, pos, "empty variable name"));
                }
                Tok::Var(src[pos_of(start)..pos_of(i)].to_owned())
            }
            '<' => {
                i += 1;
                let start = i;
                while at(i).is_some_and(|c| c != '>') {
                    let c = at(i).unwrap();
                    if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}') {
                        return Err(syntax(src, pos, "illegal character in IRI"));
                    }
                    i += 1;
                }
                if at(i).is_none() {
                    return Err(syntax(src, pos, "unterminated IRI"));
                }
                let iri = src[pos_of(start)..pos_of(i)].to_owned();
                i += 1;
                Tok::IriRef(iri)
            }
            '"' | '\'' => {
                let quote = c;
                let long = at(i + 1) == Some(quote) && at(i + 2) == Some(quote);
                i += if long { 3 } else { 1 };
                let mut s = String::new();
                loop {
                    let Some(c) = at(i) else {
                        return Err(syntax(src, pos, "unterminated string"));
                    };
                    if c == quote {
                        if !long {
                            i += 1;
                            break;
                        }
                        if at(i + 1) == Some(quote) && at(i + 2) == Some(quote) {
                            i += 3;
                            break;
                        }
                    }
                    if c == '\\' {
                        let e = at(i + 1).ok_or_else(|| syntax(src, pos, "unterminated string"))?;
                        i += 2;
                        match e {
                            't' => s.push('\t'),
                            'n' => s.push('\n'),
                            'r' => s.push('\r'),
                            'b' => s.push('\u{8}'),
                            'f' => s.push('\u{c}'),
                            '"' | '\'' | '\\' => s.push(e),
                            'u' | 'U' => {
                                let len = if e == 'u' { 4 } else { 8 };
                                let hex: String = (0..len).filter_map(|k| at(i + k)).collect();
                                let ch = u32::from_str_radix(&hex, 16)
                                    .ok()
                                    .filter(|_| hex.len() == len)
                                    .and_then(char::from_u32)
                                    .ok_or_else(|| syntax(src, pos, "invalid unicode escape"))?;
                                s.push(ch);
                                i += len;
                            }
                            _ => return Err(syntax(src, pos_of(i - 2), "invalid string escape")),
                        }
                        continue;
                    }
                    if !long && (c == '\n' || c == '\r') {
                        return Err(syntax(src, pos, "line break in string"));
                    }
                    s.push(c);
                    i += 1;
                }
                Tok::Str(s)
            }
            '@' => {
                i += 1;
                let start = i;
                while at(i).is_some_and(|c| c.is_ascii_alphanumeric() || c == '-') {
                    i += 1;
                }
                if start == i {
                    return Err(syntax(src, pos, "empty language tag"));
                }
                Tok::LangTag(src[pos_of(start)..pos_of(i)].to_owned())
            }
            '^' if at(i + 1) == Some('^') => {
                i += 2;
                Tok::DoubleCaret
            }
            c if c.is_ascii_digit() || ((c == '-' || c == '+') && at(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                i += 1;
                while at(i).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                }
                let mut dt = ns::XSD_INTEGER;
                if at(i) == Some('.') && at(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                    while at(i).is_some_and(|d| d.is_ascii_digit()) {
                        i += 1;
                    }
                    dt = ns::XSD_DECIMAL;
                }
                Tok::Number(src[pos_of(start)..pos_of(i)].to_owned(), dt)
            }
            c if c.is_alphabetic() || c == ':' || c == '_' => {
                let start = i;
                while at(i).is_some_and(is_name_char) || (at(i) == Some('.') && at(i + 1).is_some_and(is_name_char)) {
                    i += 1;
                }
                let word = src[pos_of(start)..pos_of(i)].to_owned();
                if at(i) == Some(':') {
                    i += 1;
                    let lstart = i;
                    while at(i).is_some_and(|c| is_name_char(c) || c == ':')
                        || (at(i) == Some('.') && at(i + 1).is_some_and(is_name_char))
                    {
                        i += 1;
                    }
                    Tok::PName(word, src[pos_of(lstart)..pos_of(i)].to_owned())
                } else if word.is_empty() {
                    return Err(syntax(src, pos, "unexpected character"));
                } else {
                    Tok::Word(word)
                }
            }
            '{' | '}' | '(' | ')' | '[' | ']' | '.' | ';' | ',' | '*' => {
                i += 1;
                Tok::Punct(c)
            }
            _ => return Err(syntax(src, pos, format!("unexpected character {c:?}"))),
        };
        out.push(Spanned { tok, pos });
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Spanned>,
    idx: usize,
    prefixes: BTreeMap<String, String>,
    base: Option<String>,
}

/// Parses query text in the supported subset: SELECT with `*`, variables and
/// `(COUNT(?v) AS ?alias)`; a WHERE block of triple patterns and
/// `BIND(year(...) AS ?v)`; GROUP BY; ORDER BY with ASC/DESC; LIMIT.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut p = Parser {
        src: text,
        toks: tokenize(text)?,
        idx: 0,
        prefixes: BTreeMap::new(),
        base: None,
    };
    let query = p.query()?;
    validate(&query)?;
    Ok(query)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|s| &s.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.src.len(), |s| s.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|s| s.tok.clone());
        self.idx += 1;
        t
    }

    fn err(&self, message: impl Into<String>) -> QueryError {
        syntax(self.src, self.pos(), message)
    }

    fn is_word(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        if self.is_word(kw) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, kw: &str) -> Result<(), QueryError> {
        if self.eat_word(kw) {
            Ok(())
        } else {
            Err(self.err(format!("expected {kw}")))
        }
    }

    fn is_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Punct(p)) if *p == c)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), QueryError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn check_unsupported(&self) -> Result<(), QueryError> {
        if let Some(Tok::Word(w)) = self.peek() {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED_WORDS.contains(&upper.as_str()) {
                return Err(QueryError::Unsupported(upper));
            }
        }
        Ok(())
    }

    fn expect_var(&mut self) -> Result<String, QueryError> {
        match self.next() {
            Some(Tok::Var(v)) => Ok(v),
            _ => {
                self.idx -= 1;
                Err(self.err("expected variable"))
            }
        }
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        loop {
            if self.eat_word("PREFIX") {
                let Some(Tok::PName(prefix, local)) = self.next() else {
                    self.idx -= 1;
                    return Err(self.err("expected prefix name"));
                };
                if !local.is_empty() {
                    return Err(self.err("prefix declaration must end with `:`"));
                }
                let iri = match self.next() {
                    Some(Tok::IriRef(iri)) => self.resolve(iri)?,
                    _ => {
                        self.idx -= 1;
                        return Err(self.err("expected IRI"));
                    }
                };
                self.prefixes.insert(prefix, iri);
            } else if self.eat_word("BASE") {
                match self.next() {
                    Some(Tok::IriRef(iri)) => self.base = Some(self.resolve(iri)?),
                    _ => {
                        self.idx -= 1;
                        return Err(self.err("expected IRI"));
                    }
                }
            } else {
                break;
            }
        }
        self.check_unsupported()?;
        self.expect_word("SELECT")?;
        self.check_unsupported()?;

        let mut projection = Vec::new();
        let select_all = self.eat_punct('*');
        if !select_all {
            loop {
                match self.peek() {
                    Some(Tok::Var(_)) => projection.push(Projection::Var(self.expect_var()?)),
                    Some(Tok::Punct('(')) => {
                        self.idx += 1;
                        projection.push(self.aggregate()?);
                    }
                    _ => break,
                }
            }
            if projection.is_empty() {
                return Err(self.err("expected projection"));
            }
        }

        self.check_unsupported()?;
        self.eat_word("WHERE");
        self.expect_punct('{')?;
        let (patterns, binds) = self.group_body()?;
        self.expect_punct('}')?;

        let mut group_by = Vec::new();
        let mut order_by = Vec::new();
        let mut limit = None;
        loop {
            self.check_unsupported()?;
            if self.eat_word("GROUP") {
                self.expect_word("BY")?;
                while let Some(Tok::Var(_)) = self.peek() {
                    group_by.push(self.expect_var()?);
                }
                if group_by.is_empty() {
                    return Err(self.err("GROUP BY needs at least one variable"));
                }
            } else if self.eat_word("ORDER") {
                self.expect_word("BY")?;
                loop {
                    let direction = if self.eat_word("ASC") {
                        Some(SortDirection::Asc)
                    } else if self.eat_word("DESC") {
                        Some(SortDirection::Desc)
                    } else {
                        None
                    };
                    match direction {
                        Some(direction) => {
                            self.expect_punct('(')?;
                            let var = self.expect_var()?;
                            self.expect_punct(')')?;
                            order_by.push(OrderKey { var, direction });
                        }
                        None => match self.peek() {
                            Some(Tok::Var(_)) => order_by.push(OrderKey {
                                var: self.expect_var()?,
                                direction: SortDirection::Asc,
                            }),
                            Some(Tok::Punct('(')) => return Err(QueryError::Unsupported("ORDER BY expression".into())),
                            _ => break,
                        },
                    }
                }
                if order_by.is_empty() {
                    return Err(self.err("ORDER BY needs at least one key"));
                }
            } else if self.eat_word("LIMIT") {
                match self.next() {
                    Some(Tok::Number(n, dt)) if dt == ns::XSD_INTEGER && !n.starts_with('-') => {
                        limit = Some(n.parse().map_err(|_| self.err("LIMIT out of range"))?);
                    }
                    _ => {
                        self.idx -= 1;
                        return Err(self.err("LIMIT expects a non-negative integer"));
                    }
                }
            } else {
                break;
            }
        }
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }

        let mut query = Query {
            prefixes: self.prefixes.clone(),
            projection,
            select_all,
            patterns,
            binds,
            group_by,
            order_by,
            limit,
        };
        if select_all {
            query.projection = query.where_vars().into_iter().map(Projection::Var).collect();
        }
        Ok(query)
    }

    fn aggregate(&mut self) -> Result<Projection, QueryError> {
        self.check_unsupported()?;
        if !self.eat_word("COUNT") {
            return match self.peek() {
                Some(Tok::Word(w)) => Err(QueryError::Unsupported(format!(
                    "projection expression {}",
                    w.to_ascii_uppercase()
                ))),
                _ => Err(self.err("expected COUNT")),
            };
        }
        self.expect_punct('(')?;
        self.check_unsupported()?;
        let var = if self.eat_punct('*') {
            None
        } else {
            Some(self.expect_var()?)
        };
        self.expect_punct(')')?;
        self.expect_word("AS")?;
        let alias = self.expect_var()?;
        self.expect_punct(')')?;
        Ok(Projection::Count { var, alias })
    }

    fn group_body(&mut self) -> Result<(Vec<TriplePattern>, Vec<Bind>), QueryError> {
        let mut patterns = Vec::new();
        let mut binds = Vec::new();
        loop {
            self.check_unsupported()?;
            match self.peek() {
                None | Some(Tok::Punct('}')) => break,
                Some(Tok::Punct('.')) => {
                    self.idx += 1;
                }
                Some(Tok::Punct('{')) => return Err(QueryError::Unsupported("nested group pattern".into())),
                Some(Tok::Word(w)) if w.eq_ignore_ascii_case("BIND") => {
                    self.idx += 1;
                    self.expect_punct('(')?;
                    let expression = self.expression()?;
                    self.expect_word("AS")?;
                    let target = self.expect_var()?;
                    self.expect_punct(')')?;
                    binds.push(Bind {
                        expression,
                        target,
                        after_patterns: patterns.len(),
                    });
                }
                _ => self.triples_same_subject(&mut patterns)?,
            }
        }
        Ok((patterns, binds))
    }

    fn triples_same_subject(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let subject = self.var_or_term(false)?;
        if matches!(subject, VarOrTerm::Term(Term::Literal(_))) {
            return Err(self.err("literal in subject position"));
        }
        loop {
            let predicate = if self.is_word("a") {
                self.idx += 1;
                VarOrTerm::Term(Term::iri(ns::RDF_TYPE))
            } else {
                self.var_or_term(false)?
            };
            if !matches!(predicate, VarOrTerm::Var(_) | VarOrTerm::Term(Term::Iri(_))) {
                return Err(self.err("predicate must be an IRI or variable"));
            }
            loop {
                let object = self.var_or_term(true)?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.eat_punct(',') {
                    break;
                }
            }
            if !self.eat_punct(';') {
                return Ok(());
            }
            while self.eat_punct(';') {}
            if matches!(self.peek(), Some(Tok::Punct('.' | '}')) | None) {
                return Ok(());
            }
        }
    }

    fn var_or_term(&mut self, allow_literal: bool) -> Result<VarOrTerm, QueryError> {
        self.check_unsupported()?;
        if matches!(self.peek(), Some(Tok::Var(_))) {
            return Ok(VarOrTerm::Var(self.expect_var()?));
        }
        if self.is_punct('[') || self.is_punct('(') {
            return Err(QueryError::Unsupported("blank node syntax".into()));
        }
        let start = self.idx;
        let term = self.term()?;
        if term.is_literal() && !allow_literal {
            self.idx = start;
            return Err(self.err("literal not allowed here"));
        }
        Ok(VarOrTerm::Term(term))
    }

    fn term(&mut self) -> Result<Term, QueryError> {
        match self.next() {
            Some(Tok::IriRef(iri)) => Ok(Term::Iri(self.resolve(iri)?)),
            Some(Tok::PName(prefix, local)) => match self.prefixes.get(&prefix) {
                Some(ns) => Ok(Term::Iri(format!("{ns}{local}"))),
                None => {
                    self.idx -= 1;
                    Err(self.err(format!("undeclared prefix `{prefix}:`")))
                }
            },
            Some(Tok::Str(s)) => match self.peek() {
                Some(Tok::LangTag(_)) => {
                    let Some(Tok::LangTag(tag)) = self.next() else {
                        unreachable!()
                    };
                    Ok(Term::Literal(Literal::lang(s, &tag)))
                }
                Some(Tok::DoubleCaret) => {
                    self.idx += 1;
                    match self.term()? {
                        Term::Iri(dt) => Ok(Term::Literal(Literal::typed(s, dt))),
                        _ => Err(self.err("datatype must be an IRI")),
                    }
                }
                _ => Ok(Term::literal(s)),
            },
            Some(Tok::Number(n, dt)) => Ok(Term::typed_literal(n, dt)),
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("true") || w.eq_ignore_ascii_case("false") => {
                Ok(Term::typed_literal(w.to_ascii_lowercase(), ns::XSD_BOOLEAN))
            }
            _ => {
                self.idx -= 1;
                Err(self.err("expected term"))
            }
        }
    }

    fn expression(&mut self) -> Result<Expression, QueryError> {
        self.check_unsupported()?;
        match self.peek() {
            Some(Tok::Var(_)) => Ok(Expression::Var(self.expect_var()?)),
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("YEAR") => {
                self.idx += 1;
                self.expect_punct('(')?;
                let inner = self.expression()?;
                self.expect_punct(')')?;
                Ok(Expression::Year(Box::new(inner)))
            }
            Some(Tok::Word(w)) if !w.eq_ignore_ascii_case("true") && !w.eq_ignore_ascii_case("false") => {
                Err(QueryError::Unsupported(format!("function {}", w.to_ascii_uppercase())))
            }
            _ => Ok(Expression::Term(self.term()?)),
        }
    }

    fn resolve(&self, iri: String) -> Result<String, QueryError> {
        if is_absolute_iri(&iri) {
            return Ok(iri);
        }
        let base = self
            .base
            .as_deref()
            .and_then(|b| url::Url::parse(b).ok())
            .ok_or_else(|| self.err(format!("relative IRI <{iri}> and no BASE")))?;
        base.join(&iri)
            .map(String::from)
            .map_err(|_| self.err(format!("cannot resolve <{iri}>")))
    }
}

fn validate(q: &Query) -> Result<(), QueryError> {
    let invalid = |m: String| Err(QueryError::Invalid(m));
    if q.patterns.is_empty() {
        return Err(QueryError::EmptyPattern);
    }
    if q.select_all && q.is_aggregate() {
        return invalid("SELECT * cannot be combined with GROUP BY".into());
    }
    for (i, b) in q.binds.iter().enumerate() {
        let earlier_pattern = q.patterns[..b.after_patterns]
            .iter()
            .any(|tp| tp.vars().any(|v| v == b.target));
        let earlier_bind = q.binds[..i].iter().any(|o| o.target == b.target);
        if earlier_pattern || earlier_bind {
            return invalid(format!("BIND target ?{} is already bound", b.target));
        }
    }
    let where_vars = q.where_vars();
    if q.is_aggregate() {
        for p in &q.projection {
            match p {
                Projection::Var(v) if !q.group_by.contains(v) => {
                    return invalid(format!("?{v} is projected but not grouped"));
                }
                Projection::Count { alias, .. } if where_vars.contains(alias) => {
                    return invalid(format!("alias ?{alias} is already used in WHERE"));
                }
                _ => {}
            }
        }
    }
    let mut seen = Vec::new();
    for p in &q.projection {
        if seen.contains(&p.name()) {
            return invalid(format!("?{} is projected twice", p.name()));
        }
        seen.push(p.name());
    }
    for key in &q.order_by {
        if !seen.contains(&key.var.as_str()) && !q.group_by.contains(&key.var) {
            return invalid(format!("ORDER BY ?{} is neither projected nor grouped", key.var));
        }
    }
    Ok(())
}

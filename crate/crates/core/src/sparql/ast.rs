use std::collections::BTreeMap;
use std::fmt;

use crate::rdf::Term;

/// A term or a variable in a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarOrTerm {
    Var(String),
    Term(Term),
}

impl VarOrTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            VarOrTerm::Var(v) => Some(v),
            VarOrTerm::Term(_) => None,
        }
    }
}

impl fmt::Display for VarOrTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarOrTerm::Var(v) => write!(f, "?{v}"),
            VarOrTerm::Term(t) => t.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: VarOrTerm,
    pub predicate: VarOrTerm,
    pub object: VarOrTerm,
}

impl TriplePattern {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(VarOrTerm::var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expression {
    Var(String),
    Term(Term),
    Year(Box<Expression>),
}

/// `BIND (expr AS ?target)`, evaluated after the first `after_patterns`
/// triple patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bind {
    pub expression: Expression,
    pub target: String,
    pub after_patterns: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Var(String),
    /// `(COUNT(?var) AS ?alias)`; `var` is `None` for `COUNT(*)`.
    Count {
        var: Option<String>,
        alias: String,
    },
}

impl Projection {
    /// Column name in the result table.
    pub fn name(&self) -> &str {
        match self {
            Projection::Var(v) => v,
            Projection::Count { alias, .. } => alias,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortDirection {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderKey {
    pub var: String,
    pub direction: SortDirection,
}

/// A parsed SELECT query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub prefixes: BTreeMap<String, String>,
    /// Expanded projection; `SELECT *` lists every variable in order of first appearance.
    pub projection: Vec<Projection>,
    pub select_all: bool,
    pub patterns: Vec<TriplePattern>,
    pub binds: Vec<Bind>,
    pub group_by: Vec<String>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
}

impl Query {
    pub fn is_aggregate(&self) -> bool {
        !self.group_by.is_empty() || self.projection.iter().any(|p| matches!(p, Projection::Count { .. }))
    }

    pub fn header(&self) -> Vec<String> {
        self.projection.iter().map(|p| p.name().to_owned()).collect()
    }

    /// Every variable bound by the WHERE clause, in order of first appearance.
    pub fn where_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |v: &str| {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_owned());
            }
        };
        let mut binds = self.binds.iter().peekable();
        for (i, tp) in self.patterns.iter().enumerate() {
            while let Some(b) = binds.next_if(|b| b.after_patterns <= i) {
                push(&b.target);
            }
            tp.vars().for_each(&mut push);
        }
        for b in binds {
            push(&b.target);
        }
        out
    }
}

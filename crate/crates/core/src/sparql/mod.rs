//! A SPARQL subset: SELECT over basic graph patterns with `BIND(year(..))`,
//! `COUNT`, `GROUP BY`, `ORDER BY` and `LIMIT`, plus placeholder templates.

mod ast;
mod eval;
mod parser;
mod results;
mod template;

pub use ast::{Bind, Expression, OrderKey, Projection, Query, SortDirection, TriplePattern, VarOrTerm};
pub use eval::{compare_terms, evaluate, evaluate_with, year_of, EvalError, EvalOptions};
pub use parser::parse_query;
pub use results::ResultTable;
pub use template::{PlaceholderContext, QueryTemplate, TemplateError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("query syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported SPARQL feature: {0}")]
    Unsupported(String),
    #[error("empty basic graph pattern is not supported")]
    EmptyPattern,
    #[error("invalid query: {0}")]
    Invalid(String),
}

/// Prefix declarations shipped as the default query prologue.
pub const DEFAULT_PREFIXES: &str = include_str!("../../fixtures/prefixes.rq");

//! Left-to-right BGP evaluation with BIND, COUNT/GROUP BY, ORDER BY and LIMIT.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;

use super::ast::{Expression, Projection, Query, SortDirection, TriplePattern, VarOrTerm};
use super::results::ResultTable;
use crate::rdf::{ns, Graph, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("year() applied to {0}, which is not a date")]
    NotADate(String),
}

/// Evaluation switches.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Fail on a `year()` argument that is not a date instead of dropping the row.
    pub strict_dates: bool,
}

type Solution = Vec<Option<Term>>;

/// Evaluates `query` over the set union of `graphs`.
pub fn evaluate(query: &Query, graphs: &[&Graph]) -> Result<ResultTable, EvalError> {
    evaluate_with(query, graphs, EvalOptions::default())
}

pub fn evaluate_with(query: &Query, graphs: &[&Graph], options: EvalOptions) -> Result<ResultTable, EvalError> {
    let mut vars = query.where_vars();
    for v in query.group_by.iter().chain(query.order_by.iter().map(|k| &k.var)) {
        if !vars.contains(v) && !query.projection.iter().any(|p| p.name() == v) {
            vars.push(v.clone());
        }
    }
    let slot = |name: &str| vars.iter().position(|v| v == name);

    let solutions = solve(query, graphs, &vars, options)?;

    // Each output row carries its projected cells plus the order key values.
    let mut rows: Vec<(Solution, Solution)> = if query.is_aggregate() {
        aggregate(query, &solutions, &slot)
    } else {
        solutions
            .iter()
            .map(|sol| {
                let cells = query
                    .projection
                    .iter()
                    .map(|p| slot(p.name()).and_then(|i| sol[i].clone()))
                    .collect();
                let keys = query
                    .order_by
                    .iter()
                    .map(|k| slot(&k.var).and_then(|i| sol[i].clone()))
                    .collect();
                (cells, keys)
            })
            .collect()
    };

    if !query.order_by.is_empty() {
        let mut keyed: Vec<(String, (Solution, Solution))> =
            rows.into_iter().map(|r| (canonical_row(&r.0), r)).collect();
        keyed.sort_by(|(ca, (_, ka)), (cb, (_, kb))| {
            for (i, key) in query.order_by.iter().enumerate() {
                let ord = compare_terms(ka[i].as_ref(), kb[i].as_ref());
                let ord = match key.direction {
                    SortDirection::Asc => ord,
                    SortDirection::Desc => ord.reverse(),
                };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            ca.cmp(cb)
        });
        rows = keyed.into_iter().map(|(_, r)| r).collect();
    }
    if let Some(limit) = query.limit {
        rows.truncate(limit);
    }
    Ok(ResultTable {
        header: query.header(),
        rows: rows.into_iter().map(|(cells, _)| cells).collect(),
    })
}

fn solve(query: &Query, graphs: &[&Graph], vars: &[String], options: EvalOptions) -> Result<Vec<Solution>, EvalError> {
    let slot = |name: &str| vars.iter().position(|v| v == name).expect("known variable");
    let mut solutions: Vec<Solution> = vec![vec![None; vars.len()]];
    let mut binds = query.binds.iter().peekable();
    for i in 0..=query.patterns.len() {
        while let Some(bind) = binds.next_if(|b| b.after_patterns <= i) {
            let target = slot(&bind.target);
            let mut next = Vec::with_capacity(solutions.len());
            for mut sol in solutions {
                if let Some(value) = eval_expression(&bind.expression, &sol, &slot, options)? {
                    sol[target] = Some(value);
                    next.push(sol);
                }
            }
            solutions = next;
        }
        let Some(pattern) = query.patterns.get(i) else {
            break;
        };
        solutions = join(pattern, solutions, graphs, &slot);
        if solutions.is_empty() {
            break;
        }
    }
    Ok(solutions)
}

fn join(
    pattern: &TriplePattern,
    solutions: Vec<Solution>,
    graphs: &[&Graph],
    slot: &impl Fn(&str) -> usize,
) -> Vec<Solution> {
    let mut out = Vec::new();
    for sol in solutions {
        let resolve = |vt: &VarOrTerm| -> Option<Term> {
            match vt {
                VarOrTerm::Term(t) => Some(t.clone()),
                VarOrTerm::Var(v) => sol[slot(v)].clone(),
            }
        };
        let (s, p, o) = (
            resolve(&pattern.subject),
            resolve(&pattern.predicate),
            resolve(&pattern.object),
        );
        for triple in probe(graphs, s.as_ref(), p.as_ref(), o.as_ref()) {
            let mut ext = sol.clone();
            let ok = [
                (&pattern.subject, triple.subject),
                (&pattern.predicate, triple.predicate),
                (&pattern.object, triple.object),
            ]
            .into_iter()
            .all(|(vt, value)| match vt {
                VarOrTerm::Term(_) => true,
                VarOrTerm::Var(v) => {
                    let cell = &mut ext[slot(v)];
                    match cell {
                        Some(existing) => *existing == value,
                        None => {
                            *cell = Some(value);
                            true
                        }
                    }
                }
            });
            if ok {
                out.push(ext);
            }
        }
    }
    out
}

/// Matches across all graphs as one set, in canonical order.
fn probe(graphs: &[&Graph], s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
    if p.is_some_and(|p| !p.is_iri()) || s.is_some_and(Term::is_literal) {
        return Vec::new();
    }
    match graphs {
        [] => Vec::new(),
        [g] => g.match_pattern(s, p, o),
        _ => {
            let set: BTreeSet<Triple> = graphs.iter().flat_map(|g| g.match_unordered(s, p, o)).collect();
            set.into_iter().collect()
        }
    }
}

fn eval_expression(
    expr: &Expression,
    sol: &Solution,
    slot: &impl Fn(&str) -> usize,
    options: EvalOptions,
) -> Result<Option<Term>, EvalError> {
    Ok(match expr {
        Expression::Var(v) => sol[slot(v)].clone(),
        Expression::Term(t) => Some(t.clone()),
        Expression::Year(inner) => match eval_expression(inner, sol, slot, options)? {
            None => None,
            Some(arg) => match year_of(&arg) {
                Some(year) => Some(Term::Literal(Literal::integer(year))),
                None if options.strict_dates => return Err(EvalError::NotADate(arg.to_string())),
                None => None,
            },
        },
    })
}

/// Extracts the year from an `xsd:date`, `xsd:dateTime` or `xsd:gYear`
/// literal, or from a plain literal shaped `YYYY` or `YYYY-MM-DD`.
pub fn year_of(term: &Term) -> Option<i64> {
    static DATE: OnceLock<Regex> = OnceLock::new();
    let re = DATE.get_or_init(|| {
        Regex::new(r"^(-?\d{4})(?:-(\d{2})-(\d{2})(?:T\d{2}:\d{2}:\d{2}(?:\.\d+)?)?)?(?:Z|[+-]\d{2}:\d{2})?$")
            .expect("valid regex")
    });
    let lit = term.as_literal()?;
    if !matches!(
        lit.datatype(),
        None | Some(ns::XSD_DATE | ns::XSD_DATE_TIME | ns::XSD_G_YEAR)
    ) {
        return None;
    }
    let caps = re.captures(lit.lexical().trim())?;
    if let (Some(m), Some(d)) = (caps.get(2), caps.get(3)) {
        let month: u32 = m.as_str().parse().ok()?;
        let day: u32 = d.as_str().parse().ok()?;
        if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            return None;
        }
    } else if lit.datatype() == Some(ns::XSD_DATE) || lit.datatype() == Some(ns::XSD_DATE_TIME) {
        return None;
    }
    caps[1].parse().ok()
}

fn aggregate(
    query: &Query,
    solutions: &[Solution],
    slot: &impl Fn(&str) -> Option<usize>,
) -> Vec<(Solution, Solution)> {
    let key_slots: Vec<Option<usize>> = query.group_by.iter().map(|v| slot(v)).collect();
    let mut groups: BTreeMap<Solution, Vec<&Solution>> = BTreeMap::new();
    for sol in solutions {
        let key = key_slots.iter().map(|s| s.and_then(|i| sol[i].clone())).collect();
        groups.entry(key).or_default().push(sol);
    }
    groups
        .into_iter()
        .map(|(key, members)| {
            let grouped = |name: &str| {
                query
                    .group_by
                    .iter()
                    .position(|g| g == name)
                    .and_then(|i| key[i].clone())
            };
            let cells: Solution = query
                .projection
                .iter()
                .map(|p| match p {
                    Projection::Var(v) => grouped(v),
                    Projection::Count { var, .. } => {
                        let n = match var.as_deref().map(slot) {
                            None => members.len(),
                            Some(None) => 0,
                            Some(Some(i)) => members.iter().filter(|m| m[i].is_some()).count(),
                        };
                        Some(Term::Literal(Literal::integer(n as i64)))
                    }
                })
                .collect();
            let keys = query
                .order_by
                .iter()
                .map(|k| {
                    query
                        .projection
                        .iter()
                        .position(|p| p.name() == k.var)
                        .and_then(|i| cells[i].clone())
                        .or_else(|| grouped(&k.var))
                })
                .collect();
            (cells, keys)
        })
        .collect()
}

/// Tab-joined N-Triples forms, empty for unbound cells.
pub(crate) fn canonical_row(row: &[Option<Term>]) -> String {
    row.iter()
        .map(|c| c.as_ref().map(Term::to_string).unwrap_or_default())
        .collect::<Vec<_>>()
        .join("\t")
}

fn term_rank(t: Option<&Term>) -> u8 {
    match t {
        None => 0,
        Some(Term::Blank(_)) => 1,
        Some(Term::Iri(_)) => 2,
        Some(Term::Literal(_)) => 3,
    }
}

/// Ordering used by ORDER BY: unbound < blank < IRI < literal; numeric
/// literals compare by value, other literals by lexical form.
pub fn compare_terms(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    match (a, b) {
        (Some(Term::Literal(la)), Some(Term::Literal(lb))) => {
            // numbers first, by value; everything else by lexical form
            let num = |l: &Literal| l.is_numeric().then(|| l.lexical().parse::<f64>().ok()).flatten();
            let by_value = match (num(la), num(lb)) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            };
            by_value
                .then_with(|| la.lexical().cmp(lb.lexical()))
                .then_with(|| la.language().cmp(&lb.language()))
                .then_with(|| la.datatype().cmp(&lb.datatype()))
        }
        (Some(Term::Iri(x)), Some(Term::Iri(y))) | (Some(Term::Blank(x)), Some(Term::Blank(y))) => x.cmp(y),
        _ => term_rank(a).cmp(&term_rank(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;
    use crate::sparql::parse_query;

    #[test]
    fn year_extraction() {
        let cases = [
            (Term::typed_literal("1650-03-14", ns::XSD_DATE), Some(1650)),
            (
                Term::typed_literal("1651-06-01T10:00:00", ns::XSD_DATE_TIME),
                Some(1651),
            ),
            (Term::typed_literal("1652-01-01Z", ns::XSD_DATE), Some(1652)),
            (Term::typed_literal("1652", ns::XSD_G_YEAR), Some(1652)),
            (Term::literal("1702"), Some(1702)),
            (Term::literal("1702-05-30"), Some(1702)),
            (Term::literal("ca. 1700"), None),
            (Term::literal("1702-13-01"), None),
            (Term::typed_literal("1702", ns::XSD_DATE), None),
            (Term::typed_literal("1702", ns::XSD_INTEGER), None),
            (Term::iri("http://example.org/1702"), None),
        ];
        for (term, expected) in cases {
            assert_eq!(year_of(&term), expected, "{term}");
        }
    }

    #[test]
    fn ragged_dates_drop_rows_unless_strict() {
        let g = parse_turtle(
            r#"<http://d/1> <http://p/date> "1650" .
<http://d/2> <http://p/date> "um 1650" ."#,
            None,
        )
        .unwrap();
        let q = parse_query("select ?d ?y where { ?d <http://p/date> ?x bind(year(?x) as ?y) }").unwrap();
        let table = evaluate(&q, &[&g]).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0][1], Some(Term::Literal(Literal::integer(1650))));
        let err = evaluate_with(&q, &[&g], EvalOptions { strict_dates: true }).unwrap_err();
        assert!(matches!(err, EvalError::NotADate(_)));
    }

    #[test]
    fn empty_graph_gives_header_and_no_rows() {
        let g = Graph::new();
        for text in [
            "select * where { ?s ?p ?o }",
            "select (count(?s) as ?n) where { ?s ?p ?o }",
            "select ?p (count(*) as ?n) where { ?s ?p ?o } group by ?p",
        ] {
            let q = parse_query(text).unwrap();
            let table = evaluate(&q, &[&g]).unwrap();
            assert_eq!(table.header, q.header());
            assert!(table.rows.is_empty(), "{text}");
        }
    }

    #[test]
    fn repeated_variable_in_pattern() {
        let g = parse_turtle(
            "<http://a> <http://p> <http://a> .\n<http://a> <http://p> <http://b> .",
            None,
        )
        .unwrap();
        let q = parse_query("select ?x where { ?x <http://p> ?x }").unwrap();
        assert_eq!(
            evaluate(&q, &[&g]).unwrap().rows,
            vec![vec![Some(Term::iri("http://a"))]]
        );
    }

    #[test]
    fn numeric_order_and_desc() {
        let g = parse_turtle(
            "<http://a> <http://v> 10 .\n<http://b> <http://v> 9 .\n<http://c> <http://v> 100 .",
            None,
        )
        .unwrap();
        let q = parse_query("select ?s ?v where { ?s <http://v> ?v } order by desc(?v)").unwrap();
        let t = evaluate(&q, &[&g]).unwrap();
        let order: Vec<_> = t.rows.iter().map(|r| r[0].clone().unwrap()).collect();
        assert_eq!(
            order,
            [Term::iri("http://c"), Term::iri("http://a"), Term::iri("http://b")]
        );
        let q = parse_query("select ?s ?v where { ?s <http://v> ?v } order by ?v limit 1").unwrap();
        assert_eq!(evaluate(&q, &[&g]).unwrap().rows[0][0], Some(Term::iri("http://b")));
    }

    #[test]
    fn union_of_graphs_deduplicates() {
        let a = parse_turtle("<http://s> <http://p> 1 .\n<http://s> <http://p> 2 .", None).unwrap();
        let b = parse_turtle("<http://s> <http://p> 2 .\n<http://s> <http://p> 3 .", None).unwrap();
        let q = parse_query("select * where { ?s ?p ?o }").unwrap();
        assert_eq!(evaluate(&q, &[&a, &b]).unwrap().rows.len(), 3);
    }
}

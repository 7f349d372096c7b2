use std::fmt;
use std::time::{Duration, Instant};

use super::endpoint::{EndpointError, EndpointSpec};
use super::gnd::GndId;
use super::transport::{Request, Transport, TransportError};
use crate::rdf::{parse_turtle, Graph, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorClass {
    /// No response: timed out or the connection failed.
    Timeout,
    HttpStatus,
    ParseError,
}

impl ErrorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Timeout => "timeout",
            ErrorClass::HttpStatus => "http-status",
            ErrorClass::ParseError => "parse-error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Ok { triples: usize },
    NotFound,
    Failed { class: ErrorClass, detail: String },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Ok { triples } => write!(f, "ok ({triples} triples)"),
            Outcome::NotFound => f.write_str("not-found"),
            Outcome::Failed { class, detail } => write!(f, "{}: {detail}", class.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemReport {
    pub gnd: GndId,
    pub url: String,
    pub outcome: Outcome,
    pub attempts: u32,
    pub elapsed: Duration,
}

/// One entry per input GND, in input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractionReport {
    pub items: Vec<ItemReport>,
    /// Every URL requested, retries included, in dispatch order.
    pub requests: Vec<String>,
}

impl ExtractionReport {
    pub fn succeeded(&self) -> usize {
        self.items
            .iter()
            .filter(|i| matches!(i.outcome, Outcome::Ok { .. }))
            .count()
    }
}

impl fmt::Display for ExtractionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(
                f,
                "{}\t{}\tattempts={}\t{}ms",
                item.gnd,
                item.outcome,
                item.attempts,
                item.elapsed.as_millis()
            )?;
        }
        Ok(())
    }
}

enum Attempt {
    Done(Outcome, Graph),
    Retry(Outcome),
}

fn relabel(t: Triple, item: usize) -> Triple {
    let fix = |term: Term| match term {
        Term::Blank(label) => Term::blank(format!("g{item}_{label}")),
        other => other,
    };
    Triple {
        subject: fix(t.subject),
        predicate: t.predicate,
        object: fix(t.object),
    }
}

fn attempt(result: Result<super::transport::Response, TransportError>, url: &str, item: usize) -> Attempt {
    let failed = |class, detail: String| Outcome::Failed { class, detail };
    match result {
        Err(TransportError::Timeout) => Attempt::Retry(failed(ErrorClass::Timeout, "request timed out".into())),
        Err(TransportError::Io(e)) => Attempt::Retry(failed(ErrorClass::Timeout, e)),
        Ok(r) if r.status == 404 || r.status == 410 => Attempt::Done(Outcome::NotFound, Graph::new()),
        Ok(r) if r.status >= 500 => Attempt::Retry(failed(ErrorClass::HttpStatus, format!("HTTP {}", r.status))),
        Ok(r) if !(200..300).contains(&r.status) => Attempt::Done(
            failed(ErrorClass::HttpStatus, format!("HTTP {}", r.status)),
            Graph::new(),
        ),
        Ok(r) => match parse_turtle(&r.body, Some(url)) {
            Err(e) => Attempt::Done(failed(ErrorClass::ParseError, e.to_string()), Graph::new()),
            Ok(g) if g.is_empty() => Attempt::Done(Outcome::NotFound, Graph::new()),
            Ok(g) => {
                let g: Graph = g.iter().map(|t| relabel(t, item)).collect();
                Attempt::Done(Outcome::Ok { triples: g.len() }, g)
            }
        },
    }
}

/// [`lazy_extract_with`] sleeping on the current thread.
pub fn lazy_extract(
    gnds: &[GndId],
    endpoint: &EndpointSpec,
    transport: impl Transport,
) -> Result<(Graph, ExtractionReport), EndpointError> {
    lazy_extract_with(gnds, endpoint, transport, std::thread::sleep)
}

/// Fetches one GND at a time, in order. The politeness delay precedes every
/// request but the first; timeouts and 5xx responses are retried up to
/// `max_retries` times with a doubling delay. Item failures never abort the
/// batch. Blank nodes of item `i` are relabeled `g{i}_...`.
pub fn lazy_extract_with(
    gnds: &[GndId],
    endpoint: &EndpointSpec,
    mut transport: impl Transport,
    mut sleep: impl FnMut(Duration),
) -> Result<(Graph, ExtractionReport), EndpointError> {
    endpoint.validate()?;
    let mut graph = Graph::named(endpoint.graph_name());
    let mut report = ExtractionReport::default();
    for (i, gnd) in gnds.iter().enumerate() {
        let url = endpoint.request_url(gnd)?;
        let request = Request {
            url: url.clone(),
            accept: endpoint.accept().to_owned(),
            timeout: endpoint.timeout,
        };
        let started = Instant::now();
        let mut attempts = 0;
        let mut backoff = endpoint.politeness_delay;
        let outcome = loop {
            if !report.requests.is_empty() {
                sleep(if attempts == 0 {
                    endpoint.politeness_delay
                } else {
                    backoff
                });
            }
            attempts += 1;
            report.requests.push(url.clone());
            match attempt(transport.get(&request), &url, i) {
                Attempt::Done(outcome, g) => {
                    graph.extend_from(&g);
                    break outcome;
                }
                Attempt::Retry(outcome) if attempts > endpoint.max_retries => break outcome,
                Attempt::Retry(_) => backoff *= 2,
            }
        };
        report.items.push(ItemReport {
            gnd: gnd.clone(),
            url,
            outcome,
            attempts,
            elapsed: started.elapsed(),
        });
    }
    Ok((graph, report))
}

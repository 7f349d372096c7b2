//! `pcpkg`: fuse, align, link, enrich, version and query RDF graphs from the
//! command line. Every stage reads and writes files.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use pcpkg_core::enrich::{
    emit_sameas, gnd_subjects, lazy_extract, normalize_gnd, standardize_gnd, EndpointSpec, GndId, HttpTransport,
    RecordedTransport, Recording, Transport,
};
use pcpkg_core::fusion::{
    compute_overlap, extract_vocabulary, lint_report_csv, lint_vocabulary, parse_renames, shift_namespace,
    subset_statistics, AlignmentMapping, OverlapStats,
};
use pcpkg_core::linkdisc::{
    emit_review_report, emit_sameas_ntriples, find_links_with, Blocking, LinkConfig, LinkStatus,
};
use pcpkg_core::rdf::{ns, parse_turtle, serialize_canonical, to_ntriples_sorted};
use pcpkg_core::sparql::{evaluate_with, parse_query, EvalOptions, QueryError, DEFAULT_PREFIXES};
use pcpkg_core::versioning::Store;
use pcpkg_core::{Graph, Term};

#[derive(Parser)]
#[command(
    name = "pcpkg",
    version,
    about = "Knowledge-graph fusion pipeline for professorial catalogues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merge graphs into one canonical N-Triples file and report vocabulary statistics.
    Fuse(FuseArgs),
    /// Shift a source vocabulary into a target namespace, applying reviewed renames.
    Align(AlignArgs),
    /// Score person instances across two graphs and write a review report.
    Link(LinkArgs),
    /// Look up GND numbers at an external endpoint and build owl:sameAs links.
    Enrich(EnrichArgs),
    /// Run a SELECT query over the union of graphs.
    Query(QueryArgs),
    /// Record a new state of a named graph in a store.
    Commit(CommitArgs),
    /// List commits, newest first.
    Log(StoreArgs),
    /// Show the triples added and removed between two commits.
    Diff(DiffArgs),
    /// Write a graph as it was at a commit.
    Checkout(CheckoutArgs),
    /// Check vocabulary labels, descriptions, languages and naming.
    Lint(LintArgs),
}

#[derive(clap::Args)]
struct FuseArgs {
    /// Comma-separated input graphs (Turtle or N-Triples).
    #[arg(long, value_delimiter = ',', required = true)]
    graphs: Vec<PathBuf>,
    /// Output N-Triples file.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct AlignArgs {
    /// Comma-separated input graphs; aligned as their union.
    #[arg(long, value_delimiter = ',', required = true)]
    graphs: Vec<PathBuf>,
    /// Namespace whose vocabulary is rewritten.
    #[arg(long)]
    source_ns: String,
    /// Namespace the vocabulary moves to.
    #[arg(long, default_value = ns::PCP)]
    target_ns: String,
    /// Rename file: `old TAB new` per line, `#` comments.
    #[arg(long, alias = "renames")]
    config: Option<PathBuf>,
    /// Output N-Triples file.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockingArg {
    AllPairs,
    SharedToken,
}

#[derive(clap::Args)]
struct LinkArgs {
    /// Link configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated source graphs.
    #[arg(long, value_delimiter = ',', required = true)]
    left: Vec<PathBuf>,
    /// Comma-separated target graphs.
    #[arg(long, value_delimiter = ',', required = true)]
    right: Vec<PathBuf>,
    /// Review report CSV; printed to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Write accepted links as owl:sameAs N-Triples.
    #[arg(long)]
    sameas: Option<PathBuf>,
    /// Override the configured accept threshold.
    #[arg(long)]
    accept: Option<f64>,
    /// Override the configured review threshold.
    #[arg(long)]
    review: Option<f64>,
    /// Candidate generation: score every pair, or only pairs sharing a name token.
    #[arg(long, value_enum, default_value = "all-pairs")]
    blocking: BlockingArg,
}

#[derive(clap::Args)]
struct EnrichArgs {
    /// Comma-separated local graphs holding GND values.
    #[arg(long, value_delimiter = ',', required = true)]
    graphs: Vec<PathBuf>,
    /// Property carrying GND numbers or URLs.
    #[arg(long, default_value = "http://purl.org/pcp-on-web/ontology#gnd")]
    gnd_property: String,
    /// dnb, wikidata, dbpedia, or a custom name together with --endpoint-url and --template.
    #[arg(long, default_value = "dnb")]
    endpoint: String,
    /// SPARQL endpoint URL for a custom endpoint.
    #[arg(long)]
    endpoint_url: Option<String>,
    /// Lookup query template with a {gnd} placeholder, for a custom endpoint.
    #[arg(long)]
    template: Option<PathBuf>,
    /// Politeness delay between requests in milliseconds.
    #[arg(long)]
    delay: Option<u64>,
    /// Per-request timeout in milliseconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// Retries on timeout or 5xx.
    #[arg(long)]
    retries: Option<u32>,
    /// Replay responses from a recording directory instead of the network.
    #[arg(long, conflicts_with = "record")]
    recorded: Option<PathBuf>,
    /// Save live responses to a recording directory.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Extracted external graph (N-Triples).
    #[arg(long, short)]
    out: PathBuf,
    /// owl:sameAs links between local instances and external subjects.
    #[arg(long)]
    sameas: Option<PathBuf>,
    /// Local graphs with GND URLs replaced by bare numbers.
    #[arg(long)]
    standardized: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(clap::Args)]
struct QueryArgs {
    /// Comma-separated graphs, queried as a union.
    #[arg(long, value_delimiter = ',', required = true)]
    graphs: Vec<PathBuf>,
    /// SPARQL query file.
    #[arg(long)]
    query: PathBuf,
    /// Prefix declarations prepended to the query; a built-in set is used when omitted.
    #[arg(long)]
    prefixes: Option<PathBuf>,
    /// Output as an aligned text table or as SPARQL CSV.
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Fail when year() meets a value that is not a date.
    #[arg(long)]
    strict: bool,
    /// Write the result here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct StoreArgs {
    /// Store directory.
    #[arg(long)]
    store: PathBuf,
}

#[derive(clap::Args)]
struct CommitArgs {
    /// Store directory; created when missing.
    #[arg(long)]
    store: PathBuf,
    /// Comma-separated graphs forming the new state.
    #[arg(long, value_delimiter = ',', required = true)]
    graphs: Vec<PathBuf>,
    /// Named graph IRI the state belongs to.
    #[arg(long)]
    graph_name: String,
    /// Commit author.
    #[arg(long, default_value = "pcpkg")]
    author: String,
    /// Commit message.
    #[arg(long, short)]
    message: String,
    /// UTC seconds; defaults to now.
    #[arg(long)]
    timestamp: Option<i64>,
}

#[derive(clap::Args)]
struct DiffArgs {
    /// Store directory.
    #[arg(long)]
    store: PathBuf,
    /// Older commit id or unique prefix.
    a: String,
    /// Newer commit id or unique prefix.
    b: String,
    /// Named graph to compare when the commits touch different graphs.
    #[arg(long)]
    graph: Option<String>,
}

#[derive(clap::Args)]
struct CheckoutArgs {
    /// Store directory.
    #[arg(long)]
    store: PathBuf,
    /// Commit id or unique prefix.
    id: String,
    /// Named graph; defaults to the one the commit touched.
    #[arg(long)]
    graph: Option<String>,
    /// Output N-Triples file.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct LintArgs {
    /// Comma-separated vocabulary graphs.
    #[arg(long, value_delimiter = ',', required = true)]
    graphs: Vec<PathBuf>,
    /// Required label languages.
    #[arg(long, value_delimiter = ',', default_value = "de,en")]
    languages: Vec<String>,
    /// CSV report; printed to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Exit with status 1 when any issue is found.
    #[arg(long)]
    strict: bool,
}

enum Failure {
    /// Bad flags, missing inputs, unreadable configuration: exit 2.
    Usage(String),
    /// The operation itself failed: exit 1.
    Domain(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl ToString) -> Failure {
    Failure::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    parse_turtle(&read(path)?, None).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn load_union(paths: &[PathBuf]) -> Result<Graph, Failure> {
    let mut g = Graph::new();
    for p in paths {
        let part = load_graph(p)?;
        for (prefix, iri) in part.prefixes() {
            g.set_prefix(prefix.clone(), iri.clone());
        }
        g.extend_from(&part);
    }
    Ok(g)
}

fn print_overlap(kind: &str, s: &OverlapStats) {
    println!(
        "{kind}: joint {} disjoint {}/{} union {}/{}",
        s.joint, s.disjoint_a, s.disjoint_b, s.union_a, s.union_b
    );
}

fn fuse(args: FuseArgs) -> Outcome {
    let mut parts = Vec::new();
    for p in &args.graphs {
        parts.push((p.display().to_string(), load_graph(p)?));
    }
    let stats = subset_statistics(parts.iter().map(|(n, g)| (n.as_str(), g)));
    println!("graph\tproperties\tclasses");
    for (name, p, c) in &stats.rows {
        println!("{name}\t{p}\t{c}");
    }
    println!("sum\t{}\t{}", stats.column_sum.0, stats.column_sum.1);
    println!("distinct\t{}\t{}", stats.deduplicated.0, stats.deduplicated.1);
    if let [(_, a), (_, b)] = parts.as_slice() {
        let (va, vb) = (extract_vocabulary(a), extract_vocabulary(b));
        print_overlap("properties", &compute_overlap(&va.properties, &vb.properties));
        print_overlap("classes", &compute_overlap(&va.classes, &vb.classes));
    }
    let mut fused = Graph::new();
    for (_, g) in &parts {
        fused.extend_from(g);
    }
    write(&args.out, &serialize_canonical(&fused))?;
    println!("wrote {} triples to {}", fused.len(), args.out.display());
    Ok(())
}

fn align(args: AlignArgs) -> Outcome {
    let g = load_union(&args.graphs)?;
    let renames = match &args.config {
        Some(p) => parse_renames(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => Default::default(),
    };
    let mapping = AlignmentMapping::for_graph(&g, &args.source_ns, &args.target_ns, renames).map_err(usage)?;
    let out = shift_namespace(&g, &mapping).map_err(domain)?;
    println!(
        "renamed {} and shifted {} local names from <{}> to <{}>",
        mapping.renames().len(),
        mapping.auto_shifted().len(),
        mapping.source_namespace(),
        mapping.target_namespace()
    );
    write(&args.out, &serialize_canonical(&out))?;
    println!("wrote {} triples to {}", out.len(), args.out.display());
    Ok(())
}

fn link(args: LinkArgs) -> Outcome {
    let mut cfg = LinkConfig::from_toml(&read(&args.config)?).map_err(usage)?;
    if let Some(a) = args.accept {
        cfg.accept = a;
    }
    if let Some(r) = args.review {
        cfg.review = r;
    }
    cfg.validate().map_err(usage)?;
    let left = load_union(&args.left)?;
    let right = load_union(&args.right)?;
    let blocking = match args.blocking {
        BlockingArg::AllPairs => Blocking::AllPairs,
        BlockingArg::SharedToken => Blocking::SharedToken,
    };
    let candidates = find_links_with(&left, &right, &cfg, blocking);
    let report = emit_review_report(&candidates);
    match &args.out {
        Some(p) => {
            write(p, &report)?;
            let accepted = candidates.iter().filter(|c| c.status == LinkStatus::Accepted).count();
            println!(
                "{} candidate(s): {accepted} accepted, {} for review; report in {}",
                candidates.len(),
                candidates.len() - accepted,
                p.display()
            );
        }
        None => print!("{report}"),
    }
    if let Some(p) = &args.sameas {
        write(p, &emit_sameas_ntriples(&candidates))?;
    }
    Ok(())
}

fn endpoint_spec(args: &EnrichArgs) -> Result<EndpointSpec, Failure> {
    let mut spec = match (&args.endpoint_url, &args.template) {
        (Some(url), Some(t)) => EndpointSpec::custom_sparql(&args.endpoint, url, &read(t)?).map_err(usage)?,
        (None, None) => EndpointSpec::preset(&args.endpoint).map_err(usage)?,
        _ => return Err(usage("--endpoint-url and --template must be given together")),
    };
    if let Some(ms) = args.delay {
        spec.politeness_delay = Duration::from_millis(ms);
    }
    if let Some(ms) = args.timeout {
        spec.timeout = Duration::from_millis(ms);
    }
    if let Some(n) = args.retries {
        spec.max_retries = n;
    }
    spec.validate().map_err(usage)?;
    Ok(spec)
}

fn enrich(args: EnrichArgs) -> Outcome {
    let spec = endpoint_spec(&args)?;
    let local = load_union(&args.graphs)?;
    let (local, warnings) = standardize_gnd(&local, &args.gnd_property);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &args.standardized {
        write(p, &serialize_canonical(&local))?;
    }
    let mut seen = BTreeSet::new();
    let gnds: Vec<GndId> = local
        .match_pattern(None, Some(&Term::iri(args.gnd_property.clone())), None)
        .iter()
        .filter_map(|t| normalize_gnd(t.object.value()).ok())
        .filter(|id| seen.insert(id.clone()))
        .collect();

    let (external, report) = match (&args.recorded, &args.record) {
        (Some(dir), _) => {
            let t = RecordedTransport::load(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            lazy_extract(&gnds, &spec, t).map_err(usage)?
        }
        (None, Some(dir)) => {
            let mut t = Recording::new(HttpTransport::new());
            let result = run_extract(&gnds, &spec, &mut t)?;
            t.captured
                .save(dir)
                .map_err(|e| domain(format!("{}: {e}", dir.display())))?;
            result
        }
        (None, None) => run_extract(&gnds, &spec, HttpTransport::new())?,
    };
    print!("{report}");
    println!(
        "{} of {} GND number(s) resolved at {}",
        report.succeeded(),
        gnds.len(),
        spec.name
    );
    write(&args.out, &serialize_canonical(&external))?;
    if let Some(p) = &args.sameas {
        let links = emit_sameas(&local, &args.gnd_property, &gnd_subjects(&external));
        for w in &links.warnings {
            eprintln!("warning: {w}");
        }
        write(p, &to_ntriples_sorted(&links.triples))?;
        println!("wrote {} owl:sameAs link(s) to {}", links.triples.len(), p.display());
    }
    Ok(())
}

fn run_extract(
    gnds: &[GndId],
    spec: &EndpointSpec,
    t: impl Transport,
) -> Result<(Graph, pcpkg_core::enrich::ExtractionReport), Failure> {
    lazy_extract(gnds, spec, t).map_err(usage)
}

fn query(args: QueryArgs) -> Outcome {
    let prologue = match &args.prefixes {
        Some(p) => read(p)?,
        None => DEFAULT_PREFIXES.to_owned(),
    };
    let offset = prologue.lines().count();
    let text = format!("{prologue}\n{}", read(&args.query)?);
    let q = parse_query(&text).map_err(|e| match e {
        QueryError::Syntax { line, column, message } if line > offset + 1 => domain(format!(
            "{}: syntax error at {}:{column}: {message}",
            args.query.display(),
            line - offset - 1
        )),
        other => domain(format!("{}: {other}", args.query.display())),
    })?;
    let graphs = args
        .graphs
        .iter()
        .map(|p| load_graph(p))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&Graph> = graphs.iter().collect();
    let table = evaluate_with(
        &q,
        &refs,
        EvalOptions {
            strict_dates: args.strict,
        },
    )
    .map_err(domain)?;
    let rendered = match args.format {
        Format::Table => table.to_text_table(&q.prefixes),
        Format::Csv => table.to_csv(),
    };
    match &args.out {
        Some(p) => write(p, &rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn open_store(dir: &Path) -> Result<Store, Failure> {
    Store::open(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))
}

fn commit(args: CommitArgs) -> Outcome {
    let mut store = open_store(&args.store)?;
    let state = load_union(&args.graphs)?;
    let timestamp = args.timestamp.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs() as i64)
    });
    let c = store
        .commit(&args.graph_name, &state, &args.author, &args.message, timestamp)
        .map_err(domain)?;
    println!("{} +{} -{}", c.id, c.changes.added.len(), c.changes.removed.len());
    Ok(())
}

fn log(args: StoreArgs) -> Outcome {
    let mut out = io::stdout().lock();
    for entry in open_store(&args.store)?.log() {
        // A closed pipe (`pcpkg log | head`) is not an error.
        if writeln!(out, "{entry}").is_err() {
            break;
        }
    }
    Ok(())
}

fn diff(args: DiffArgs) -> Outcome {
    let store = open_store(&args.store)?;
    let cs = match &args.graph {
        Some(g) => store.diff_graph(&args.a, &args.b, g),
        None => store.diff(&args.a, &args.b),
    }
    .map_err(domain)?;
    for t in &cs.removed {
        println!("- {t}");
    }
    for t in &cs.added {
        println!("+ {t}");
    }
    println!("<{}>: +{} -{}", cs.graph, cs.added.len(), cs.removed.len());
    Ok(())
}

fn checkout(args: CheckoutArgs) -> Outcome {
    let store = open_store(&args.store)?;
    let g = match &args.graph {
        Some(name) => store.checkout_graph(&args.id, name),
        None => store.checkout(&args.id),
    }
    .map_err(domain)?;
    write(&args.out, &serialize_canonical(&g))?;
    println!("wrote {} triples to {}", g.len(), args.out.display());
    Ok(())
}

fn lint(args: LintArgs) -> Outcome {
    let g = load_union(&args.graphs)?;
    let langs: Vec<&str> = args.languages.iter().map(String::as_str).collect();
    let issues = lint_vocabulary(&g, &langs);
    let report = lint_report_csv(&issues);
    match &args.out {
        Some(p) => {
            write(p, &report)?;
            println!("{} issue(s); report in {}", issues.len(), p.display());
        }
        None => print!("{report}"),
    }
    if args.strict && !issues.is_empty() {
        return Err(domain(format!("{} lint issue(s)", issues.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fuse(a) => fuse(a),
        Command::Align(a) => align(a),
        Command::Link(a) => link(a),
        Command::Enrich(a) => enrich(a),
        Command::Query(a) => query(a),
        Command::Commit(a) => commit(a),
        Command::Log(a) => log(a),
        Command::Diff(a) => diff(a),
        Command::Checkout(a) => checkout(a),
        Command::Lint(a) => lint(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

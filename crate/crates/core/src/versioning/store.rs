use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::ChangeSet;
use crate::rdf::{parse_ntriples, to_ntriples_sorted, Graph, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VersionError {
    #[error("nothing to commit: graph {0} is unchanged")]
    EmptyDiff(String),
    #[error("unknown commit `{0}`")]
    UnknownCommit(String),
    #[error("commit prefix `{0}` is ambiguous")]
    AmbiguousPrefix(String),
    #[error("commits touch different graphs ({0} vs {1})")]
    GraphMismatch(String, String),
    #[error("store I/O: {0}")]
    Io(String),
    #[error("corrupt store: {0}")]
    Corrupt(String),
}

impl From<io::Error> for VersionError {
    fn from(e: io::Error) -> Self {
        VersionError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub id: String,
    pub parent: Option<String>,
    pub author: String,
    pub message: String,
    /// UTC seconds.
    pub timestamp: i64,
    pub changes: ChangeSet,
}

fn field(h: &mut Sha256, name: &str, value: &str) {
    h.update(format!("{name} {}\n", value.len()).as_bytes());
    h.update(value.as_bytes());
    h.update(b"\n");
}

impl Commit {
    /// SHA-256 over the parent, metadata and sorted N-Triples of both sides.
    pub fn compute_id(
        parent: Option<&str>,
        changes: &ChangeSet,
        author: &str,
        message: &str,
        timestamp: i64,
    ) -> String {
        let mut h = Sha256::new();
        field(&mut h, "parent", parent.unwrap_or(""));
        field(&mut h, "graph", &changes.graph);
        field(&mut h, "author", author);
        field(&mut h, "message", message);
        field(&mut h, "timestamp", &timestamp.to_string());
        field(&mut h, "add", &to_ntriples_sorted(&changes.added));
        field(&mut h, "remove", &to_ntriples_sorted(&changes.removed));
        hex::encode(h.finalize())
    }

    pub fn short_id(&self) -> &str {
        &self.id[..12]
    }
}

/// One `log` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub id: String,
    pub author: String,
    pub message: String,
    pub timestamp: i64,
    pub graph: String,
    pub added: usize,
    pub removed: usize,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} <{}> +{} -{} {}",
            &self.id[..12],
            self.timestamp,
            self.author,
            self.graph,
            self.added,
            self.removed,
            self.message.lines().next().unwrap_or("")
        )
    }
}

/// A single-writer linear history. Commits are held in memory and, for a
/// store opened on a directory, written through as
/// `commits/<id>/{meta,add.nt,remove.nt}` plus a `HEAD` file.
#[derive(Debug, Clone, Default)]
pub struct Store {
    dir: Option<PathBuf>,
    /// Root first.
    commits: Vec<Commit>,
    index: BTreeMap<String, usize>,
    heads: BTreeMap<String, Graph>,
}

impl Store {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens or creates a store directory.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, VersionError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(dir.join("commits"))?;
        let mut store = Store {
            dir: Some(dir.clone()),
            ..Store::default()
        };
        let head = match fs::read_to_string(dir.join("HEAD")) {
            Ok(s) => s.trim().to_owned(),
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e.into()),
        };
        let mut chain = Vec::new();
        let mut next = (!head.is_empty()).then_some(head);
        while let Some(id) = next {
            if chain.len() > 1_000_000 {
                return Err(VersionError::Corrupt("parent chain does not terminate".into()));
            }
            let commit = read_commit(&dir.join("commits").join(&id), &id)?;
            next = commit.parent.clone();
            chain.push(commit);
        }
        chain.reverse();
        for c in chain {
            store.push(c);
        }
        Ok(store)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.commits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.commits.len()
    }

    pub fn head(&self) -> Option<&Commit> {
        self.commits.last()
    }

    /// Root first.
    pub fn commits(&self) -> &[Commit] {
        &self.commits
    }

    /// Current state of a named graph; empty when never committed.
    pub fn head_state(&self, graph: &str) -> Graph {
        self.heads.get(graph).cloned().unwrap_or_else(|| Graph::named(graph))
    }

    fn push(&mut self, c: Commit) {
        let state = self
            .heads
            .entry(c.changes.graph.clone())
            .or_insert_with(|| Graph::named(c.changes.graph.clone()));
        c.changes.apply(state);
        self.index.insert(c.id.clone(), self.commits.len());
        self.commits.push(c);
    }

    /// Records the change from the graph's head state to `new_state`.
    pub fn commit(
        &mut self,
        graph: &str,
        new_state: &Graph,
        author: &str,
        message: &str,
        timestamp: i64,
    ) -> Result<&Commit, VersionError> {
        let changes = ChangeSet::between(graph, &self.head_state(graph), new_state);
        if changes.is_empty() {
            return Err(VersionError::EmptyDiff(graph.to_owned()));
        }
        let parent = self.head().map(|c| c.id.clone());
        let id = Commit::compute_id(parent.as_deref(), &changes, author, message, timestamp);
        let commit = Commit {
            id,
            parent,
            author: author.to_owned(),
            message: message.to_owned(),
            timestamp,
            changes,
        };
        if let Some(dir) = &self.dir {
            write_commit(dir, &commit)?;
        }
        self.push(commit);
        Ok(self.head().expect("just pushed"))
    }

    /// Full id for an exact id or a unique prefix.
    pub fn resolve(&self, prefix: &str) -> Result<&Commit, VersionError> {
        if let Some(&i) = self.index.get(prefix) {
            return Ok(&self.commits[i]);
        }
        let mut matches = self
            .index
            .range(prefix.to_owned()..)
            .take_while(|(id, _)| id.starts_with(prefix));
        match (matches.next(), matches.next()) {
            (Some((_, &i)), None) if !prefix.is_empty() => Ok(&self.commits[i]),
            (Some(_), Some(_)) => Err(VersionError::AmbiguousPrefix(prefix.to_owned())),
            _ => Err(VersionError::UnknownCommit(prefix.to_owned())),
        }
    }

    fn position(&self, id: &str) -> Result<usize, VersionError> {
        let c = self.resolve(id)?;
        Ok(self.index[&c.id])
    }

    /// State of `graph` right after commit `upto` (inclusive index).
    fn replay(&self, graph: &str, upto: usize) -> Graph {
        let mut g = Graph::named(graph);
        for c in self.commits[..=upto].iter().filter(|c| c.changes.graph == graph) {
            c.changes.apply(&mut g);
        }
        g
    }

    /// The commit's graph as it was right after the commit.
    pub fn checkout(&self, id: &str) -> Result<Graph, VersionError> {
        let i = self.position(id)?;
        Ok(self.replay(&self.commits[i].changes.graph, i))
    }

    /// A named graph as it was at commit `id`, whichever graph that commit touched.
    pub fn checkout_graph(&self, id: &str, graph: &str) -> Result<Graph, VersionError> {
        let i = self.position(id)?;
        Ok(self.replay(graph, i))
    }

    /// Changes turning the state at `a` into the state at `b`. Both commits
    /// must touch the same graph.
    pub fn diff(&self, a: &str, b: &str) -> Result<ChangeSet, VersionError> {
        let (ia, ib) = (self.position(a)?, self.position(b)?);
        let (ga, gb) = (&self.commits[ia].changes.graph, &self.commits[ib].changes.graph);
        if ga != gb {
            return Err(VersionError::GraphMismatch(ga.clone(), gb.clone()));
        }
        self.diff_graph(a, b, ga)
    }

    /// [`Store::diff`] for an explicit graph.
    pub fn diff_graph(&self, a: &str, b: &str, graph: &str) -> Result<ChangeSet, VersionError> {
        let (ia, ib) = (self.position(a)?, self.position(b)?);
        Ok(ChangeSet::between(
            graph,
            &self.replay(graph, ia),
            &self.replay(graph, ib),
        ))
    }

    /// Newest first.
    pub fn log(&self) -> Vec<LogEntry> {
        self.commits
            .iter()
            .rev()
            .map(|c| LogEntry {
                id: c.id.clone(),
                author: c.author.clone(),
                message: c.message.clone(),
                timestamp: c.timestamp,
                graph: c.changes.graph.clone(),
                added: c.changes.added.len(),
                removed: c.changes.removed.len(),
            })
            .collect()
    }
}

fn escape(value: &str) -> String {
    value.replace('\\', "\\\\").replace('\n', "\\n").replace('\r', "\\r")
}

fn unescape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    let mut chars = value.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

fn write_commit(dir: &Path, c: &Commit) -> Result<(), VersionError> {
    let commits = dir.join("commits");
    let tmp = commits.join(format!(".tmp-{}", c.id));
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    fs::create_dir_all(&tmp)?;
    let meta = format!(
        "id: {}\nparent: {}\ngraph: {}\nauthor: {}\ntimestamp: {}\nmessage: {}\nadded: {}\nremoved: {}\n",
        c.id,
        c.parent.as_deref().unwrap_or(""),
        escape(&c.changes.graph),
        escape(&c.author),
        c.timestamp,
        escape(&c.message),
        c.changes.added.len(),
        c.changes.removed.len(),
    );
    fs::write(tmp.join("meta"), meta)?;
    fs::write(tmp.join("add.nt"), to_ntriples_sorted(&c.changes.added))?;
    fs::write(tmp.join("remove.nt"), to_ntriples_sorted(&c.changes.removed))?;
    let target = commits.join(&c.id);
    if target.exists() {
        fs::remove_dir_all(&target)?;
    }
    fs::rename(&tmp, &target)?;
    let head_tmp = dir.join("HEAD.tmp");
    fs::write(&head_tmp, format!("{}\n", c.id))?;
    fs::rename(head_tmp, dir.join("HEAD"))?;
    Ok(())
}

fn read_triples(path: &Path) -> Result<BTreeSet<Triple>, VersionError> {
    let text = fs::read_to_string(path)?;
    let g = parse_ntriples(&text).map_err(|e| VersionError::Corrupt(format!("{}: {e}", path.display())))?;
    Ok(g.iter().collect())
}

fn read_commit(path: &Path, id: &str) -> Result<Commit, VersionError> {
    let meta = fs::read_to_string(path.join("meta")).map_err(|e| VersionError::Corrupt(format!("commit {id}: {e}")))?;
    let mut fields = BTreeMap::new();
    for line in meta.lines() {
        if let Some((k, v)) = line
            .split_once(": ")
            .or_else(|| line.strip_suffix(':').map(|k| (k, "")))
        {
            fields.insert(k.to_owned(), v.to_owned());
        }
    }
    let get = |k: &str| {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| VersionError::Corrupt(format!("commit {id}: missing `{k}`")))
    };
    let parent = get("parent")?;
    let timestamp = get("timestamp")?
        .parse()
        .map_err(|_| VersionError::Corrupt(format!("commit {id}: bad timestamp")))?;
    let changes = ChangeSet {
        graph: unescape(&get("graph")?),
        added: read_triples(&path.join("add.nt"))?,
        removed: read_triples(&path.join("remove.nt"))?,
    };
    let commit = Commit {
        id: get("id")?,
        parent: (!parent.is_empty()).then_some(parent),
        author: unescape(&get("author")?),
        message: unescape(&get("message")?),
        timestamp,
        changes,
    };
    let expected = Commit::compute_id(
        commit.parent.as_deref(),
        &commit.changes,
        &commit.author,
        &commit.message,
        commit.timestamp,
    );
    if commit.id != id || expected != id {
        return Err(VersionError::Corrupt(format!(
            "commit {id}: content does not match its id"
        )));
    }
    Ok(commit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::fusion::{parse_renames, shift_namespace, AlignmentMapping};
    use crate::rdf::{ns, serialize_canonical};

    const G: &str = "http://purl.org/pcp-on-web/ontology";

    #[test]
    fn root_commit_and_empty_diff() {
        let mut s = Store::in_memory();
        assert!(s.log().is_empty());
        let g = fixtures::graph(fixtures::PERSON_LEIPZIG);
        let c = s.commit(G, &g, "ann", "import", 1).unwrap();
        assert_eq!(c.parent, None);
        assert_eq!((c.changes.added.len(), c.changes.removed.len()), (3, 0));
        assert_eq!(
            s.commit(G, &g, "ann", "again", 2),
            Err(VersionError::EmptyDiff(G.into()))
        );
        let head = s.head().unwrap().id.clone();
        assert_eq!(s.checkout(&head).unwrap(), g);
    }

    #[test]
    fn rename_fix_commit_matches_set_difference() {
        let before = fixtures::graph(fixtures::ONTOLOGY_ISSUES);
        let renames = parse_renames(fixtures::QUALITY_RENAMES).unwrap();
        let m = AlignmentMapping::for_graph(&before, ns::PCP, ns::PCP, renames).unwrap();
        let after = shift_namespace(&before, &m).unwrap();
        let mut s = Store::in_memory();
        s.commit(G, &before, "ann", "import", 1).unwrap();
        let c = s.commit(G, &after, "ann", "quality fixes", 2).unwrap();
        let expected_added: BTreeSet<Triple> = after.difference(&before).into_iter().collect();
        let expected_removed: BTreeSet<Triple> = before.difference(&after).into_iter().collect();
        assert_eq!(c.changes.added, expected_added);
        assert_eq!(c.changes.removed, expected_removed);
        assert_eq!(c.changes.added.len(), c.changes.removed.len());
        assert!(!c.changes.added.is_empty());
    }

    #[test]
    fn ids_are_deterministic() {
        let g = fixtures::graph(fixtures::PERSON_HELMSTEDT);
        let mut a = Store::in_memory();
        let mut b = Store::in_memory();
        let ia = a.commit(G, &g, "x", "m", 5).unwrap().id.clone();
        let ib = b.commit(G, &g, "x", "m", 5).unwrap().id.clone();
        assert_eq!(ia, ib);
        let mut c = Store::in_memory();
        assert_ne!(c.commit(G, &g, "x", "m", 6).unwrap().id, ia);
    }

    #[test]
    fn diff_log_and_prefixes() {
        let mut s = Store::in_memory();
        let g1 = fixtures::graph(fixtures::PERSON_LEIPZIG);
        let mut g2 = g1.clone();
        g2.extend_from(&fixtures::graph(fixtures::PERSON_HELMSTEDT));
        let a = s.commit(G, &g1, "a", "one", 1).unwrap().id.clone();
        let b = s.commit(G, &g2, "a", "two", 2).unwrap().id.clone();
        let c = s.commit(G, &g1, "a", "three\nbody", 3).unwrap().id.clone();
        assert!(s.diff(&a, &a).unwrap().is_empty());
        assert_eq!(s.diff(&a, &b).unwrap(), s.diff(&b, &a).unwrap().inverse());
        assert!(s.diff(&a, &c).unwrap().is_empty());
        let log = s.log();
        assert_eq!(log.len(), 3);
        assert_eq!(log[0].id, c);
        assert_eq!((log[1].added, log[1].removed), (3, 0));
        assert_eq!((log[0].added, log[0].removed), (0, 3));
        assert!(log[0].to_string().starts_with(&c[..12]));
        assert_eq!(s.resolve(&b[..12]).unwrap().id, b);
        assert!(matches!(s.resolve("zz"), Err(VersionError::UnknownCommit(_))));
        assert!(matches!(s.resolve(""), Err(VersionError::AmbiguousPrefix(_))));
    }

    #[test]
    fn separate_graphs_do_not_mix() {
        let mut s = Store::in_memory();
        let a = s
            .commit("http://g/a", &fixtures::graph(fixtures::PERSON_LEIPZIG), "x", "a", 1)
            .unwrap()
            .id
            .clone();
        let b = s
            .commit("http://g/b", &fixtures::graph(fixtures::PERSON_HELMSTEDT), "x", "b", 2)
            .unwrap()
            .id
            .clone();
        assert_eq!(s.checkout(&b).unwrap().len(), 3);
        assert_eq!(s.checkout_graph(&b, "http://g/a").unwrap().len(), 3);
        assert!(matches!(s.diff(&a, &b), Err(VersionError::GraphMismatch(..))));
    }

    #[test]
    fn persisted_store_reopens() {
        let dir = tempfile::tempdir().unwrap();
        let g1 = fixtures::graph(fixtures::QUALIFICATION_DOCUMENTS);
        let mut g2 = g1.clone();
        for t in g1.triples().into_iter().take(5) {
            g2.remove(&t);
        }
        let ids = {
            let mut s = Store::open(dir.path()).unwrap();
            let a = s.commit(G, &g1, "ann", "import", 10).unwrap().id.clone();
            let b = s.commit(G, &g2, "bob", "trim\nmore", 20).unwrap().id.clone();
            [a, b]
        };
        let s = Store::open(dir.path()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.head().unwrap().id, ids[1]);
        assert_eq!(s.head().unwrap().message, "trim\nmore");
        assert_eq!(
            serialize_canonical(&s.checkout(&ids[0]).unwrap()),
            serialize_canonical(&g1)
        );
        assert_eq!(s.checkout(&ids[1]).unwrap(), g2);
        let add = fs::read_to_string(dir.path().join("commits").join(&ids[0]).join("add.nt")).unwrap();
        assert_eq!(add.lines().count(), g1.len());
    }

    #[test]
    fn tampered_commit_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let id = {
            let mut s = Store::open(dir.path()).unwrap();
            s.commit(G, &fixtures::graph(fixtures::PERSON_LEIPZIG), "a", "m", 1)
                .unwrap()
                .id
                .clone()
        };
        fs::write(
            dir.path().join("commits").join(&id).join("remove.nt"),
            "<http://x/a> <http://x/b> <http://x/c> .\n",
        )
        .unwrap();
        assert!(matches!(Store::open(dir.path()), Err(VersionError::Corrupt(_))));
    }
}

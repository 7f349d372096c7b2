use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Duration;

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Request {
    pub url: String,
    pub accept: String,
    pub timeout: Duration,
}

impl Request {
    /// Hex SHA-256 over the method, URL and Accept header. Used as the
    /// recording key.
    pub fn key(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"GET ");
        h.update(self.url.as_bytes());
        h.update(b"\nAccept: ");
        h.update(self.accept.as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("transport failure: {0}")]
    Io(String),
}

/// A blocking GET client. Implementations must not reorder requests.
pub trait Transport {
    fn get(&mut self, request: &Request) -> Result<Response, TransportError>;
}

impl<T: Transport + ?Sized> Transport for &mut T {
    fn get(&mut self, request: &Request) -> Result<Response, TransportError> {
        (**self).get(request)
    }
}

/// Live HTTP client.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new() -> Self {
        let agent = ureq::AgentBuilder::new()
            .user_agent(concat!("pcpkg/", env!("CARGO_PKG_VERSION")))
            .build();
        HttpTransport { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl Transport for HttpTransport {
    fn get(&mut self, request: &Request) -> Result<Response, TransportError> {
        let result = self
            .agent
            .get(&request.url)
            .set("Accept", &request.accept)
            .timeout(request.timeout)
            .call();
        let response = match result {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(ureq::Error::Transport(t)) => {
                let text = t.to_string();
                return Err(if text.contains("timed out") || text.contains("Timeout") {
                    TransportError::Timeout
                } else {
                    TransportError::Io(text)
                });
            }
        };
        let status = response.status();
        let body = response.into_string().map_err(|e| TransportError::Io(e.to_string()))?;
        Ok(Response { status, body })
    }
}

/// What a recording holds for one request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recorded {
    Response(Response),
    Timeout,
}

/// Replays responses keyed by [`Request::key`] and logs every request.
///
/// On disk: `index.tsv` with `key TAB status-or-"timeout" TAB url` lines and
/// one `<key>.body` file per response.
#[derive(Debug, Clone, Default)]
pub struct RecordedTransport {
    responses: BTreeMap<String, (String, Recorded)>,
    log: Vec<Request>,
}

impl RecordedTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, request: &Request, recorded: Recorded) {
        self.responses.insert(request.key(), (request.url.clone(), recorded));
    }

    /// Requests received so far, in order.
    pub fn requests(&self) -> &[Request] {
        &self.log
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn load(dir: &Path) -> io::Result<Self> {
        let index = fs::read_to_string(dir.join("index.tsv"))?;
        let mut out = Self::new();
        for (n, line) in index.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad =
                |msg: &str| io::Error::new(io::ErrorKind::InvalidData, format!("index.tsv line {}: {msg}", n + 1));
            let mut cols = line.splitn(3, '\t');
            let (Some(key), Some(status), Some(url)) = (cols.next(), cols.next(), cols.next()) else {
                return Err(bad("expected key, status and url"));
            };
            if key.len() != 64 || !key.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(bad("key is not a hex SHA-256"));
            }
            let recorded = if status == "timeout" {
                Recorded::Timeout
            } else {
                let status: u16 = status.parse().map_err(|_| bad("status is not a number"))?;
                let body = fs::read_to_string(dir.join(format!("{key}.body")))?;
                Recorded::Response(Response { status, body })
            };
            out.responses.insert(key.to_owned(), (url.to_owned(), recorded));
        }
        Ok(out)
    }

    /// Writes the recording; an existing index is replaced.
    pub fn save(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let mut index = String::new();
        for (key, (url, recorded)) in &self.responses {
            let status = match recorded {
                Recorded::Timeout => "timeout".to_owned(),
                Recorded::Response(r) => {
                    fs::write(dir.join(format!("{key}.body")), &r.body)?;
                    r.status.to_string()
                }
            };
            index.push_str(&format!("{key}\t{status}\t{url}\n"));
        }
        fs::write(dir.join("index.tsv"), index)
    }
}

impl Transport for RecordedTransport {
    fn get(&mut self, request: &Request) -> Result<Response, TransportError> {
        self.log.push(request.clone());
        match self.responses.get(&request.key()) {
            Some((_, Recorded::Response(r))) => Ok(r.clone()),
            Some((_, Recorded::Timeout)) => Err(TransportError::Timeout),
            None => Err(TransportError::Io(format!("no recording for {}", request.url))),
        }
    }
}

/// Passes requests through and captures the responses for later replay.
pub struct Recording<T> {
    inner: T,
    pub captured: RecordedTransport,
}

impl<T: Transport> Recording<T> {
    pub fn new(inner: T) -> Self {
        Recording {
            inner,
            captured: RecordedTransport::new(),
        }
    }
}

impl<T: Transport> Transport for Recording<T> {
    fn get(&mut self, request: &Request) -> Result<Response, TransportError> {
        let result = self.inner.get(request);
        match &result {
            Ok(r) => self.captured.insert(request, Recorded::Response(r.clone())),
            Err(TransportError::Timeout) => self.captured.insert(request, Recorded::Timeout),
            Err(TransportError::Io(_)) => {}
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(url: &str) -> Request {
        Request {
            url: url.into(),
            accept: "text/turtle".into(),
            timeout: Duration::from_secs(1),
        }
    }

    #[test]
    fn key_ignores_timeout() {
        let mut a = req("https://x/1");
        let b = a.clone();
        a.timeout = Duration::from_secs(9);
        assert_eq!(a.key(), b.key());
        assert_ne!(a.key(), req("https://x/2").key());
        assert_eq!(a.key().len(), 64);
    }

    #[test]
    fn save_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut rec = RecordedTransport::new();
        rec.insert(
            &req("https://x/1"),
            Recorded::Response(Response {
                status: 200,
                body: "<a> <b> <c> .\n".into(),
            }),
        );
        rec.insert(&req("https://x/2"), Recorded::Timeout);
        rec.save(dir.path()).unwrap();
        let mut loaded = RecordedTransport::load(dir.path()).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded.get(&req("https://x/1")).unwrap().status, 200);
        assert_eq!(loaded.get(&req("https://x/2")), Err(TransportError::Timeout));
        assert!(matches!(loaded.get(&req("https://x/3")), Err(TransportError::Io(_))));
        let urls: Vec<&str> = loaded.requests().iter().map(|r| r.url.as_str()).collect();
        assert_eq!(urls, ["https://x/1", "https://x/2", "https://x/3"]);
    }

    #[test]
    fn recording_wrapper_captures() {
        let mut source = RecordedTransport::new();
        source.insert(
            &req("https://x/1"),
            Recorded::Response(Response {
                status: 404,
                body: String::new(),
            }),
        );
        let mut rec = Recording::new(source);
        rec.get(&req("https://x/1")).unwrap();
        assert!(rec.get(&req("https://x/9")).is_err());
        assert_eq!(rec.captured.len(), 1);
    }
}

use std::collections::BTreeMap;
use std::time::Duration;

use super::gnd::{dnb_document_url, GndId};
use crate::sparql::{QueryTemplate, TemplateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointKind {
    /// SPARQL protocol endpoint queried with an instantiated template.
    Sparql,
    /// One linked-data document per GND.
    LinkedDataDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EndpointError {
    #[error("unknown endpoint `{0}` (expected dnb, wikidata or dbpedia)")]
    Unknown(String),
    #[error("lookup template must reference {{gnd}} and nothing else")]
    Template,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("invalid endpoint URL {0:?}")]
    Url(String),
    #[error(transparent)]
    Instantiate(#[from] TemplateError),
}

const WIKIDATA_TEMPLATE: &str = r#"PREFIX wdt: <http://www.wikidata.org/prop/direct/>
CONSTRUCT { ?item ?p ?o }
WHERE { ?item wdt:P227 "{gnd}" . ?item ?p ?o . }
"#;

const DBPEDIA_TEMPLATE: &str = r#"PREFIX owl: <http://www.w3.org/2002/07/owl#>
CONSTRUCT { ?item ?p ?o }
WHERE {
  { ?item owl:sameAs <https://d-nb.info/gnd/{gnd}> } UNION { ?item owl:sameAs <http://d-nb.info/gnd/{gnd}> }
  ?item ?p ?o .
}
"#;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointSpec {
    pub name: String,
    pub kind: EndpointKind,
    pub base_url: String,
    template: Option<QueryTemplate>,
    pub politeness_delay: Duration,
    pub timeout: Duration,
    pub max_retries: u32,
}

impl EndpointSpec {
    fn with_defaults(name: &str, kind: EndpointKind, base_url: &str, template: Option<&str>) -> Self {
        EndpointSpec {
            name: name.to_owned(),
            kind,
            base_url: base_url.to_owned(),
            template: template.map(QueryTemplate::new),
            politeness_delay: Duration::from_millis(1000),
            timeout: Duration::from_secs(30),
            max_retries: 3,
        }
    }

    pub fn dnb() -> Self {
        Self::with_defaults("dnb", EndpointKind::LinkedDataDocument, "https://d-nb.info/gnd/", None)
    }

    pub fn wikidata() -> Self {
        Self::with_defaults(
            "wikidata",
            EndpointKind::Sparql,
            "https://query.wikidata.org/sparql",
            Some(WIKIDATA_TEMPLATE),
        )
    }

    pub fn dbpedia() -> Self {
        Self::with_defaults(
            "dbpedia",
            EndpointKind::Sparql,
            "https://dbpedia.org/sparql",
            Some(DBPEDIA_TEMPLATE),
        )
    }

    pub fn preset(name: &str) -> Result<Self, EndpointError> {
        match name {
            "dnb" => Ok(Self::dnb()),
            "wikidata" => Ok(Self::wikidata()),
            "dbpedia" => Ok(Self::dbpedia()),
            other => Err(EndpointError::Unknown(other.to_owned())),
        }
    }

    /// A SPARQL endpoint with a user-supplied lookup template.
    pub fn custom_sparql(name: &str, base_url: &str, template: &str) -> Result<Self, EndpointError> {
        let spec = Self::with_defaults(name, EndpointKind::Sparql, base_url, Some(template));
        spec.validate()?;
        Ok(spec)
    }

    pub fn template(&self) -> Option<&QueryTemplate> {
        self.template.as_ref()
    }

    pub fn validate(&self) -> Result<(), EndpointError> {
        if url::Url::parse(&self.base_url).is_err() {
            return Err(EndpointError::Url(self.base_url.clone()));
        }
        if self.kind == EndpointKind::Sparql {
            let ok = self
                .template
                .as_ref()
                .is_some_and(|t| t.required().len() == 1 && t.required().contains("gnd"));
            if !ok {
                return Err(EndpointError::Template);
            }
        }
        if self.politeness_delay.is_zero() {
            return Err(EndpointError::NonPositive("politeness delay"));
        }
        if self.timeout.is_zero() {
            return Err(EndpointError::NonPositive("timeout"));
        }
        Ok(())
    }

    /// Named graph receiving this endpoint's extracted data.
    pub fn graph_name(&self) -> String {
        format!("http://purl.org/pcp-on-web/{}", self.name)
    }

    /// URL fetched for one GND.
    pub fn request_url(&self, id: &GndId) -> Result<String, EndpointError> {
        match self.kind {
            EndpointKind::LinkedDataDocument => {
                if self.base_url == "https://d-nb.info/gnd/" {
                    Ok(dnb_document_url(id))
                } else {
                    Ok(format!("{}{id}", self.base_url))
                }
            }
            EndpointKind::Sparql => {
                let query = build_lookup_query(self, id)?;
                let mut url = url::Url::parse(&self.base_url).map_err(|_| EndpointError::Url(self.base_url.clone()))?;
                url.query_pairs_mut().append_pair("query", &query);
                Ok(url.into())
            }
        }
    }

    pub fn accept(&self) -> &'static str {
        match self.kind {
            EndpointKind::LinkedDataDocument => "text/turtle, application/n-triples;q=0.9",
            EndpointKind::Sparql => "application/n-triples, text/turtle;q=0.9",
        }
    }
}

/// Instantiates the endpoint's lookup template for one GND.
pub fn build_lookup_query(endpoint: &EndpointSpec, id: &GndId) -> Result<String, EndpointError> {
    let template = endpoint.template.as_ref().ok_or(EndpointError::Template)?;
    if !template.required().contains("gnd") {
        return Err(EndpointError::Template);
    }
    let bindings = BTreeMap::from([("gnd".to_string(), id.to_string())]);
    Ok(template.instantiate(&bindings)?)
}

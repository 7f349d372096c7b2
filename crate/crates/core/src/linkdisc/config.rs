use std::collections::BTreeMap;

use serde::Deserialize;

use crate::rdf::is_absolute_iri;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinkConfigError {
    #[error("link config: {0}")]
    Parse(String),
    #[error("link config: {0}")]
    Invalid(String),
}

/// Which instances to compare, on which property pairs, and where the
/// accept/review cut-offs lie.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    /// `None` considers every IRI subject that carries a compared property.
    pub source_class: Option<String>,
    pub target_class: Option<String>,
    pub pairs: Vec<(String, String)>,
    pub accept: f64,
    pub review: f64,
}

impl LinkConfig {
    pub fn new(pairs: Vec<(String, String)>, accept: f64, review: f64) -> Result<Self, LinkConfigError> {
        let cfg = LinkConfig {
            source_class: None,
            target_class: None,
            pairs,
            accept,
            review,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_classes(mut self, source: impl Into<String>, target: impl Into<String>) -> Self {
        self.source_class = Some(source.into());
        self.target_class = Some(target.into());
        self
    }

    /// Every source property against every target property.
    pub fn cross(source: &[&str], target: &[&str], accept: f64, review: f64) -> Result<Self, LinkConfigError> {
        let pairs = source
            .iter()
            .flat_map(|s| target.iter().map(move |t| (s.to_string(), t.to_string())))
            .collect();
        Self::new(pairs, accept, review)
    }

    pub fn validate(&self) -> Result<(), LinkConfigError> {
        if !(0.0..=1.0).contains(&self.review) || !(0.0..=1.0).contains(&self.accept) || self.review > self.accept {
            return Err(LinkConfigError::Invalid(format!(
                "thresholds must satisfy 0 <= review ({}) <= accept ({}) <= 1",
                self.review, self.accept
            )));
        }
        if self.pairs.is_empty() {
            return Err(LinkConfigError::Invalid("no property pairs to compare".into()));
        }
        for iri in self
            .pairs
            .iter()
            .flat_map(|(s, t)| [s, t])
            .chain(self.source_class.iter())
            .chain(self.target_class.iter())
        {
            if !is_absolute_iri(iri) {
                return Err(LinkConfigError::Invalid(format!("`{iri}` is not an absolute IRI")));
            }
        }
        Ok(())
    }

    /// Reads the TOML form: `[prefixes]`, optional `[classes] source/target`,
    /// `[properties]` with either `pairs = [[s, t], ...]` or `source`/`target`
    /// lists (zipped, or crossed with `cross = true`), and `[thresholds]`.
    pub fn from_toml(text: &str) -> Result<Self, LinkConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| LinkConfigError::Parse(e.to_string()))?;
        let expand = |name: &str| expand_curie(name, &raw.prefixes);
        let mut pairs = Vec::new();
        for [s, t] in &raw.properties.pairs {
            pairs.push((expand(s)?, expand(t)?));
        }
        let (src, tgt) = (&raw.properties.source, &raw.properties.target);
        if raw.properties.cross {
            for s in src {
                for t in tgt {
                    pairs.push((expand(s)?, expand(t)?));
                }
            }
        } else {
            if src.len() != tgt.len() {
                return Err(LinkConfigError::Invalid(format!(
                    "properties.source has {} entries but properties.target has {}; set cross = true to compare all pairs",
                    src.len(),
                    tgt.len()
                )));
            }
            for (s, t) in src.iter().zip(tgt) {
                pairs.push((expand(s)?, expand(t)?));
            }
        }
        let source_class = raw.classes.source.as_deref().map(expand).transpose()?;
        let target_class = raw.classes.target.as_deref().map(expand).transpose()?;
        let cfg = LinkConfig {
            source_class,
            target_class,
            pairs,
            accept: raw.thresholds.accept,
            review: raw.thresholds.review,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn expand_curie(name: &str, prefixes: &BTreeMap<String, String>) -> Result<String, LinkConfigError> {
    if let Some(iri) = name.strip_prefix('<').and_then(|n| n.strip_suffix('>')) {
        return Ok(iri.to_owned());
    }
    if let Some((prefix, local)) = name.split_once(':') {
        if let Some(ns) = prefixes.get(prefix) {
            return Ok(format!("{ns}{local}"));
        }
        if is_absolute_iri(name) && (local.starts_with("//") || prefix == "urn") {
            return Ok(name.to_owned());
        }
    }
    Err(LinkConfigError::Invalid(format!(
        "cannot expand `{name}`: unknown prefix"
    )))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    prefixes: BTreeMap<String, String>,
    #[serde(default)]
    classes: RawClasses,
    properties: RawProperties,
    thresholds: RawThresholds,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawClasses {
    source: Option<String>,
    target: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProperties {
    #[serde(default)]
    pairs: Vec<[String; 2]>,
    #[serde(default)]
    source: Vec<String>,
    #[serde(default)]
    target: Vec<String>,
    #[serde(default)]
    cross: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    accept: f64,
    review: f64,
}

//! Versioned JSON persistence of a fitted posterior.

use std::path::Path;

use gpbayes::pipeline::{DataView, Params};
use gpbayes::{Case, Family, ModelSpec, Posterior, SuffStats};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// The model as the user specified it. Kept in this loose form because the
/// non-informative priors use infinite sentinels that JSON cannot carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescription {
    pub family: Family,
    pub case: Case,
    /// `None` is the non-informative prior.
    pub prior: Option<Params>,
    pub known: Params,
}

impl ModelDescription {
    pub fn spec(&self) -> gpbayes::Result<ModelSpec> {
        ModelSpec::from_parts(self.family, self.case, self.prior.as_ref(), &self.known)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotRecord {
    pub theta: f64,
    pub k: usize,
    pub view: DataView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
}

impl Default for Metadata {
    fn default() -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDocument {
    pub schema_version: u32,
    pub model: ModelDescription,
    pub posterior: Posterior,
    /// Statistics of all data folded into `posterior` so far.
    pub stats: SuffStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pot: Option<PotRecord>,
    pub metadata: Metadata,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot access state file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("state file {path} is not a posterior document: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("state file {path} has schema version {found}; this build reads version {SCHEMA_VERSION}")]
    Version { path: String, found: String },
    #[error("posterior has a non-finite parameter ({0}); it cannot be saved")]
    NonFinite(String),
}

impl PosteriorDocument {
    pub fn new(model: ModelDescription, posterior: Posterior, stats: SuffStats) -> Self {
        PosteriorDocument {
            schema_version: SCHEMA_VERSION,
            model,
            posterior,
            stats,
            pot: None,
            metadata: Metadata::default(),
        }
    }

    /// Pretty JSON with a trailing newline. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_json(&self) -> Result<String, DocumentError> {
        let value = serde_json::to_value(self.posterior).expect("posterior serializes");
        if let Some(bad) = first_null(&value, "posterior") {
            return Err(DocumentError::NonFinite(bad));
        }
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str, path: &str) -> Result<Self, DocumentError> {
        let parse = |source| DocumentError::Parse {
            path: path.to_string(),
            source,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(parse)?;
        let version = value.get("schema_version");
        if version.and_then(|v| v.as_u64()) != Some(u64::from(SCHEMA_VERSION)) {
            return Err(DocumentError::Version {
                path: path.to_string(),
                found: version.map_or("none".into(), |v| v.to_string()),
            });
        }
        serde_json::from_value(value).map_err(parse)
    }

    pub fn save(&self, path: &Path) -> Result<(), DocumentError> {
        std::fs::write(path, self.to_json()?).map_err(|source| DocumentError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
            path: name.clone(),
            source,
        })?;
        Self::from_json(&text, &name)
    }
}

/// Path of the first `null` in `v`, which is where serde_json puts
/// non-finite floats.
fn first_null(v: &serde_json::Value, at: &str) -> Option<String> {
    match v {
        serde_json::Value::Null => Some(at.to_string()),
        serde_json::Value::Object(o) => o.iter().find_map(|(k, x)| first_null(x, &format!("{at}.{k}"))),
        serde_json::Value::Array(a) => a
            .iter()
            .enumerate()
            .find_map(|(i, x)| first_null(x, &format!("{at}[{i}]"))),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gpbayes::fit;

    fn laptop() -> PosteriorDocument {
        let model = ModelDescription {
            family: Family::Pareto,
            case: Case::Location,
            prior: Some([("l0".to_string(), 100.0), ("n0".to_string(), 1.0)].into()),
            known: [("alpha".to_string(), 1.2)].into(),
        };
        let mut data: Vec<f64> = (85..=103).map(f64::from).collect();
        data.push(80.0);
        let stats = SuffStats::from_data(&data);
        let post = fit(&model.spec().unwrap(), &stats).unwrap();
        PosteriorDocument::new(model, post, stats)
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let doc = laptop();
        let json = doc.to_json().unwrap();
        let back = PosteriorDocument::from_json(&json, "mem").unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn version_is_checked() {
        let json = laptop().to_json().unwrap().replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(
            PosteriorDocument::from_json(&json, "mem"),
            Err(DocumentError::Version { .. })
        ));
    }
}

//! Term-importance weight providers.

use std::collections::HashMap;
use std::path::Path;

use crate::corpus::Language;
use crate::error::{Error, Result};
use crate::sidecar::{SidecarClient, TermWeightRequest};

/// Supplies raw, non-negative importance weights for a function's terms.
pub trait TermWeighter: Send + Sync {
    fn name(&self) -> String;
    fn raw_weights(&self, code: &str, language: Language, terms: &[String]) -> Result<Vec<f64>>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct UniformWeights;

impl TermWeighter for UniformWeights {
    fn name(&self) -> String {
        "uniform".into()
    }

    fn raw_weights(&self, _code: &str, _language: Language, terms: &[String]) -> Result<Vec<f64>> {
        Ok(vec![1.0; terms.len()])
    }
}

/// Fixed per-term weights from a JSON object `{"term": weight, ...}`.
#[derive(Debug, Clone)]
pub struct FileWeights {
    source: String,
    weights: HashMap<String, f64>,
}

impl FileWeights {
    pub fn from_map(source: impl Into<String>, weights: HashMap<String, f64>) -> Result<Self> {
        let source = source.into();
        if let Some((t, w)) = weights.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::provider(
                format!("file:{source}"),
                format!("invalid weight {w} for term {t:?}"),
            ));
        }
        Ok(FileWeights { source, weights })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let weights: HashMap<String, f64> = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        FileWeights::from_map(path.display().to_string(), weights)
    }
}

impl TermWeighter for FileWeights {
    fn name(&self) -> String {
        format!("file:{}", self.source)
    }

    fn raw_weights(&self, _code: &str, _language: Language, terms: &[String]) -> Result<Vec<f64>> {
        terms
            .iter()
            .map(|t| {
                self.weights.get(t).copied().ok_or_else(|| {
                    Error::provider(self.name(), format!("no weight for term {t:?}"))
                })
            })
            .collect()
    }
}

/// Attention-derived weights from the model sidecar.
#[derive(Debug, Clone)]
pub struct SidecarWeights {
    client: SidecarClient,
}

impl SidecarWeights {
    pub fn new(client: SidecarClient) -> Self {
        SidecarWeights { client }
    }
}

impl TermWeighter for SidecarWeights {
    fn name(&self) -> String {
        format!("sidecar:{}", self.client.base_url())
    }

    fn raw_weights(&self, code: &str, language: Language, terms: &[String]) -> Result<Vec<f64>> {
        let response = self.client.term_weights(&TermWeightRequest {
            code: code.to_string(),
            language: language.tag().to_string(),
            terms: terms.to_vec(),
        })?;
        Ok(response.weights)
    }
}

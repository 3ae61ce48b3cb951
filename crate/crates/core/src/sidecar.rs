//! HTTP client for the model sidecar.
//!
//! The sidecar serves transformer-derived signals: per-term attention mass
//! (`POST /v1/term-weights`) and unit-normalized text embeddings
//! (`POST /v1/embed`). Responses are validated against the protocol
//! invariants before they reach the scorers.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Overrides every configured `sidecar:` URL when set.
pub const SIDECAR_URL_ENV: &str = "CIDRE_SIDECAR_URL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeightRequest {
    pub code: String,
    pub language: String,
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeightResponse {
    pub weights: Vec<f64>,
    pub model_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub vectors: Vec<Vec<f64>>,
    pub dim: usize,
    pub model_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    #[serde(default)]
    pub model_id: Option<String>,
    #[serde(default)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SidecarClient {
    base_url: String,
    agent: ureq::Agent,
}

/// Applies the environment override to a configured URL.
pub fn resolve_url(configured: &str) -> String {
    std::env::var(SIDECAR_URL_ENV)
        .ok()
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| configured.to_string())
}

impl SidecarClient {
    pub fn new(base_url: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        SidecarClient {
            base_url: base_url.trim_end_matches('/').to_string(),
            agent,
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::provider(format!("sidecar:{}", self.base_url), message)
    }

    fn post<Req: Serialize, Resp: for<'de> Deserialize<'de>>(
        &self,
        path: &str,
        body: &Req,
    ) -> Result<Resp> {
        let url = format!("{}{path}", self.base_url);
        let mut response = self
            .agent
            .post(&url)
            .send_json(body)
            .map_err(|e| self.fail(format!("POST {path}: {e}")))?;
        response
            .body_mut()
            .read_json::<Resp>()
            .map_err(|e| self.fail(format!("POST {path}: malformed response: {e}")))
    }

    pub fn health(&self) -> Result<Health> {
        let url = format!("{}/v1/health", self.base_url);
        let mut response = self
            .agent
            .get(&url)
            .call()
            .map_err(|e| self.fail(format!("GET /v1/health: {e}")))?;
        response
            .body_mut()
            .read_json::<Health>()
            .map_err(|e| self.fail(format!("GET /v1/health: malformed response: {e}")))
    }

    pub fn term_weights(&self, request: &TermWeightRequest) -> Result<TermWeightResponse> {
        let response: TermWeightResponse = self.post("/v1/term-weights", request)?;
        if response.weights.len() != request.terms.len() {
            return Err(self.fail(format!(
                "{} weights for {} terms",
                response.weights.len(),
                request.terms.len()
            )));
        }
        if let Some((i, w)) = response
            .weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(self.fail(format!(
                "invalid weight {w} for term {:?}",
                request.terms[i]
            )));
        }
        Ok(response)
    }

    pub fn embed(&self, request: &EmbedRequest) -> Result<EmbedResponse> {
        let response: EmbedResponse = self.post("/v1/embed", request)?;
        if response.vectors.len() != request.texts.len() {
            return Err(self.fail(format!(
                "{} vectors for {} texts",
                response.vectors.len(),
                request.texts.len()
            )));
        }
        for v in &response.vectors {
            if v.len() != response.dim {
                return Err(self.fail(format!(
                    "vector of length {} in a response declaring dim {}",
                    v.len(),
                    response.dim
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(self.fail("non-finite embedding component"));
            }
        }
        Ok(response)
    }
}

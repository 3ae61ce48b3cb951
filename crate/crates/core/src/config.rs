//! Run configuration and provider selection.
//!
//! Provider specs are short strings: `uniform`, `none`, `hash` or `hash:DIM`,
//! `file:PATH`, and `sidecar:URL`. Which ones are accepted depends on the slot.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::informativeness::{
    FileWeights, NoEmbeddings, SidecarWeights, TermWeighter, UniformWeights, WordEmbeddings,
    WordVectors,
};
use crate::relevance::{FileEmbedder, HashEmbedder, SidecarEmbedder, TextEmbedder};
use crate::sidecar::{resolve_url, SidecarClient};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderSpec {
    Uniform,
    None,
    Hash(usize),
    File(PathBuf),
    Sidecar(String),
}

impl FromStr for ProviderSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match (head, rest) {
            ("uniform", None) => Ok(ProviderSpec::Uniform),
            ("none", None) => Ok(ProviderSpec::None),
            ("hash", None) => Ok(ProviderSpec::Hash(HashEmbedder::DEFAULT_DIM)),
            ("hash", Some(d)) => match d.parse::<usize>() {
                Ok(dim) if dim > 0 => Ok(ProviderSpec::Hash(dim)),
                _ => Err(Error::Config(format!("bad hash dimension {d:?}"))),
            },
            ("file", Some(p)) if !p.is_empty() => Ok(ProviderSpec::File(PathBuf::from(p))),
            ("sidecar", Some(u)) if !u.is_empty() => Ok(ProviderSpec::Sidecar(u.to_string())),
            _ => Err(Error::Config(format!("unrecognized provider {s:?}"))),
        }
    }
}

impl fmt::Display for ProviderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProviderSpec::Uniform => f.write_str("uniform"),
            ProviderSpec::None => f.write_str("none"),
            ProviderSpec::Hash(d) => write!(f, "hash:{d}"),
            ProviderSpec::File(p) => write!(f, "file:{}", p.display()),
            ProviderSpec::Sidecar(u) => write!(f, "sidecar:{u}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Cosine a comment word must exceed to count as a synonym of a term.
    pub similarity_threshold: f64,
    pub filter_threshold: f64,
    pub ce_clip_epsilon: f64,
    /// `uniform`, `file:PATH` (JSON term → weight) or `sidecar:URL`.
    pub weight_provider: String,
    /// Word vectors for synonym matching: `none` or `file:PATH`.
    pub embed_provider: String,
    /// Code/comment embeddings: `hash[:DIM]`, `file:PATH` or `sidecar:URL`.
    pub relevance_provider: String,
    pub lemma_files: Vec<PathBuf>,
    pub stopword_files: Vec<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            similarity_threshold: 0.5,
            filter_threshold: 0.5,
            ce_clip_epsilon: 1e-15,
            weight_provider: "uniform".into(),
            embed_provider: "none".into(),
            relevance_provider: "hash".into(),
            lemma_files: Vec::new(),
            stopword_files: Vec::new(),
        }
    }
}

fn in_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {v} must lie in (0, 1)")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Config(format!("{}: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        in_open_unit("similarity_threshold", self.similarity_threshold)?;
        in_open_unit("filter_threshold", self.filter_threshold)?;
        if !(self.ce_clip_epsilon > 0.0 && self.ce_clip_epsilon < 0.5) {
            return Err(Error::Config(format!(
                "ce_clip_epsilon = {} must lie in (0, 0.5)",
                self.ce_clip_epsilon
            )));
        }
        self.weight_spec()?;
        self.embed_spec()?;
        self.relevance_spec()?;
        Ok(())
    }

    pub fn weight_spec(&self) -> Result<ProviderSpec> {
        slot("weight_provider", &self.weight_provider, |s| {
            matches!(
                s,
                ProviderSpec::Uniform | ProviderSpec::File(_) | ProviderSpec::Sidecar(_)
            )
        })
    }

    pub fn embed_spec(&self) -> Result<ProviderSpec> {
        slot("embed_provider", &self.embed_provider, |s| {
            matches!(s, ProviderSpec::None | ProviderSpec::File(_))
        })
    }

    pub fn relevance_spec(&self) -> Result<ProviderSpec> {
        slot("relevance_provider", &self.relevance_provider, |s| {
            matches!(
                s,
                ProviderSpec::Hash(_) | ProviderSpec::File(_) | ProviderSpec::Sidecar(_)
            )
        })
    }
}

fn slot(name: &str, value: &str, allowed: impl Fn(&ProviderSpec) -> bool) -> Result<ProviderSpec> {
    let spec: ProviderSpec = value
        .parse()
        .map_err(|e| Error::Config(format!("{name}: {e}")))?;
    if allowed(&spec) {
        Ok(spec)
    } else {
        Err(Error::Config(format!("{name} does not accept {spec}")))
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Connects to a sidecar; a non-200 health answer means it is not ready.
fn connect(url: &str) -> Result<SidecarClient> {
    let client = SidecarClient::new(&resolve_url(url));
    client.health().map_err(config_err)?;
    Ok(client)
}

pub fn build_weighter(spec: &ProviderSpec) -> Result<Box<dyn TermWeighter>> {
    Ok(match spec {
        ProviderSpec::Uniform => Box::new(UniformWeights),
        ProviderSpec::File(p) => Box::new(FileWeights::load(p).map_err(config_err)?),
        ProviderSpec::Sidecar(u) => Box::new(SidecarWeights::new(connect(u)?)),
        other => return Err(Error::Config(format!("{other} cannot weigh terms"))),
    })
}

pub fn build_word_embeddings(spec: &ProviderSpec) -> Result<Box<dyn WordEmbeddings>> {
    Ok(match spec {
        ProviderSpec::None => Box::new(NoEmbeddings),
        ProviderSpec::File(p) => Box::new(WordVectors::load(p).map_err(config_err)?),
        other => {
            return Err(Error::Config(format!(
                "{other} cannot provide word vectors"
            )))
        }
    })
}

pub fn build_text_embedder(spec: &ProviderSpec) -> Result<Box<dyn TextEmbedder>> {
    Ok(match spec {
        ProviderSpec::Hash(d) => Box::new(HashEmbedder::new(*d)),
        ProviderSpec::File(p) => Box::new(FileEmbedder::load(p).map_err(config_err)?),
        ProviderSpec::Sidecar(u) => Box::new(SidecarEmbedder::new(connect(u)?)),
        other => return Err(Error::Config(format!("{other} cannot embed text"))),
    })
}

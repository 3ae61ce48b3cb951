use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use super::{DenseVector, EmbedItem};
use crate::error::{Error, Result};
use crate::sidecar::{EmbedRequest, SidecarClient};
use crate::text::split_identifier;

/// Maps texts to dense vectors of one fixed dimension.
pub trait TextEmbedder: Send + Sync {
    fn name(&self) -> String;
    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<DenseVector>>;
}

/// Key under which ad-hoc text is looked up in a precomputed file.
pub fn text_key(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut key = String::with_capacity(5 + 64);
    key.push_str("text:");
    for b in digest {
        key.push_str(&format!("{b:02x}"));
    }
    key
}

/// Deterministic bag-of-words feature hashing with unsigned counts, so any
/// non-empty text has a non-zero vector. Intended for tests and offline runs.
#[derive(Debug, Clone, Copy)]
pub struct HashEmbedder {
    dim: usize,
}

impl HashEmbedder {
    pub const DEFAULT_DIM: usize = 64;

    pub fn new(dim: usize) -> Self {
        HashEmbedder { dim: dim.max(1) }
    }

    pub fn embed_text(&self, text: &str) -> DenseVector {
        let mut v = vec![0.0; self.dim];
        let words = text
            .split(|c: char| !c.is_alphanumeric())
            .flat_map(split_identifier)
            .map(str::to_lowercase);
        for word in words {
            let bucket = (fnv1a(word.as_bytes()) % self.dim as u64) as usize;
            v[bucket] += 1.0;
        }
        DenseVector::new(v)
    }
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder::new(Self::DEFAULT_DIM)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl TextEmbedder for HashEmbedder {
    fn name(&self) -> String {
        format!("hash:{}", self.dim)
    }

    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<DenseVector>> {
        Ok(items.iter().map(|it| self.embed_text(it.text)).collect())
    }
}

/// Precomputed vectors: header `count dim`, then `id v1 … vdim` per line.
///
/// Items are looked up by their key (`<pair id>#code`, `<pair id>#comment`)
/// and then by [`text_key`] of their text.
#[derive(Debug, Clone)]
pub struct FileEmbedder {
    source: String,
    dim: usize,
    vectors: HashMap<String, DenseVector>,
}

impl FileEmbedder {
    pub fn from_reader<R: BufRead>(source: impl Into<String>, reader: R) -> Result<Self> {
        let source = source.into();
        let corrupt = |line: usize, message: String| Error::Corpus { line, message };
        let mut lines = reader.lines().enumerate();
        let header = match lines.next() {
            Some((_, l)) => l.map_err(|e| corrupt(1, e.to_string()))?,
            None => return Err(corrupt(1, "empty embedding file".into())),
        };
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| corrupt(1, format!("bad header {header:?}")))?;
        let [count, dim] = nums[..] else {
            return Err(corrupt(
                1,
                format!("bad header {header:?}, expected \"count dim\""),
            ));
        };
        if dim == 0 {
            return Err(corrupt(1, "zero dimension".into()));
        }
        let mut vectors = HashMap::with_capacity(count);
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line.map_err(|e| corrupt(lineno, e.to_string()))?;
            let mut parts = line.split_whitespace();
            let Some(id) = parts.next() else { continue };
            let values: Vec<f64> = parts
                .map(|p| p.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<_>>()
                .ok_or_else(|| corrupt(lineno, "bad vector component".into()))?;
            if values.len() != dim {
                return Err(corrupt(
                    lineno,
                    format!("{} components, expected {dim}", values.len()),
                ));
            }
            if vectors
                .insert(id.to_string(), DenseVector::new(values))
                .is_some()
            {
                return Err(corrupt(lineno, format!("duplicate id {id:?}")));
            }
        }
        if vectors.len() != count {
            return Err(corrupt(
                1,
                format!(
                    "header declares {count} vectors, file holds {}",
                    vectors.len()
                ),
            ));
        }
        Ok(FileEmbedder {
            source,
            dim,
            vectors,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        FileEmbedder::from_reader(path.display().to_string(), BufReader::new(file))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl TextEmbedder for FileEmbedder {
    fn name(&self) -> String {
        format!("file:{}", self.source)
    }

    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<DenseVector>> {
        items
            .iter()
            .map(|item| {
                let by_key = item.key.as_deref().and_then(|k| self.vectors.get(k));
                by_key
                    .or_else(|| self.vectors.get(&text_key(item.text)))
                    .cloned()
                    .ok_or_else(|| {
                        Error::provider(
                            self.name(),
                            format!(
                                "no vector for {}",
                                item.key.as_deref().unwrap_or("ad-hoc text")
                            ),
                        )
                    })
            })
            .collect()
    }
}

/// Embeddings served by the model sidecar, in batches.
#[derive(Debug)]
pub struct SidecarEmbedder {
    client: SidecarClient,
    batch: usize,
    dim: OnceLock<usize>,
}

impl SidecarEmbedder {
    pub fn new(client: SidecarClient) -> Self {
        SidecarEmbedder {
            client,
            batch: 32,
            dim: OnceLock::new(),
        }
    }

    pub fn with_batch_size(mut self, batch: usize) -> Self {
        self.batch = batch.max(1);
        self
    }
}

impl TextEmbedder for SidecarEmbedder {
    fn name(&self) -> String {
        format!("sidecar:{}", self.client.base_url())
    }

    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<DenseVector>> {
        let mut out = Vec::with_capacity(items.len());
        for chunk in items.chunks(self.batch) {
            let request = EmbedRequest {
                texts: chunk.iter().map(|i| i.text.to_string()).collect(),
            };
            let response = self.client.embed(&request)?;
            let dim = *self.dim.get_or_init(|| response.dim);
            if response.dim != dim {
                return Err(Error::provider(
                    self.name(),
                    format!("dimension changed from {dim} to {}", response.dim),
                ));
            }
            out.extend(response.vectors.into_iter().map(DenseVector::new));
        }
        Ok(out)
    }
}

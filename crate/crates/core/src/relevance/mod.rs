//! Code–comment semantic relevance and hard-negative mining.

mod providers;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use providers::{text_key, FileEmbedder, HashEmbedder, SidecarEmbedder, TextEmbedder};

use crate::corpus::CodeCommentPair;
use crate::error::{Error, Result};
use crate::similarity::cosine;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Self {
        DenseVector(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn cosine(&self, other: &DenseVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(cosine(&self.0, &other.0))
    }
}

/// Text to embed, with an optional lookup key for precomputed providers.
#[derive(Debug, Clone)]
pub struct EmbedItem<'a> {
    pub key: Option<String>,
    pub text: &'a str,
}

impl<'a> EmbedItem<'a> {
    pub fn text(text: &'a str) -> Self {
        EmbedItem { key: None, text }
    }

    pub fn code_of(pair: &'a CodeCommentPair) -> Self {
        EmbedItem {
            key: Some(format!("{}#code", pair.id)),
            text: &pair.code,
        }
    }

    pub fn comment_of(pair: &'a CodeCommentPair) -> Self {
        EmbedItem {
            key: Some(format!("{}#comment", pair.id)),
            text: &pair.comment,
        }
    }
}

fn embed_two(provider: &dyn TextEmbedder, a: EmbedItem<'_>, b: EmbedItem<'_>) -> Result<f64> {
    let vs = provider.embed(&[a, b])?;
    match &vs[..] {
        [x, y] => x
            .cosine(y)
            .map_err(|e| Error::provider(provider.name(), e.to_string())),
        _ => Err(Error::provider(
            provider.name(),
            format!("{} vectors for 2 texts", vs.len()),
        )),
    }
}

pub fn relevance(code: &str, comment: &str, provider: &dyn TextEmbedder) -> Result<f64> {
    embed_two(provider, EmbedItem::text(code), EmbedItem::text(comment))
}

/// Relevance of a corpus record, letting precomputed providers key by id.
pub fn pair_relevance(pair: &CodeCommentPair, provider: &dyn TextEmbedder) -> Result<f64> {
    embed_two(
        provider,
        EmbedItem::code_of(pair),
        EmbedItem::comment_of(pair),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletRecord {
    pub anchor_id: String,
    pub positive_id: String,
    pub negative_id: String,
    pub similarity: f64,
}

pub const DEFAULT_MINING_K: usize = 3;
pub const DEFAULT_MIN_SIMILARITY: f64 = 0.0;

/// For every pair, the `k` other comments most similar to its code that
/// exceed `min_similarity`, hardest first.
///
/// The anchor is the code embedding; the positive is the pair's own comment.
pub fn mine_hard_negatives(
    pairs: &[CodeCommentPair],
    provider: &dyn TextEmbedder,
    k: usize,
    min_similarity: f64,
) -> Result<Vec<TripletRecord>> {
    if pairs.len() < 2 {
        return Err(Error::invalid(
            "hard-negative mining needs at least 2 pairs",
        ));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let codes = provider.embed(&pairs.iter().map(EmbedItem::code_of).collect::<Vec<_>>())?;
    let comments = provider.embed(&pairs.iter().map(EmbedItem::comment_of).collect::<Vec<_>>())?;
    if codes.len() != pairs.len() || comments.len() != pairs.len() {
        return Err(Error::provider(
            provider.name(),
            "vector count differs from pair count",
        ));
    }

    let per_anchor: Vec<Vec<TripletRecord>> = (0..pairs.len())
        .into_par_iter()
        .map(|i| -> Result<Vec<TripletRecord>> {
            let mut candidates = Vec::with_capacity(pairs.len() - 1);
            for (j, comment) in comments.iter().enumerate() {
                if j == i {
                    continue;
                }
                let sim = codes[i]
                    .cosine(comment)
                    .map_err(|e| Error::provider(provider.name(), e.to_string()))?;
                if sim > min_similarity {
                    candidates.push((j, sim));
                }
            }
            candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            candidates.truncate(k);
            Ok(candidates
                .into_iter()
                .map(|(j, sim)| TripletRecord {
                    anchor_id: pairs[i].id.clone(),
                    positive_id: pairs[i].id.clone(),
                    negative_id: pairs[j].id.clone(),
                    similarity: sim,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_anchor.into_iter().flatten().collect())
}

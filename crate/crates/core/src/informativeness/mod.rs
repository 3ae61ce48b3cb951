//! How much of the vocabulary of a function's identifiers its comment
//! conveys.
//!
//! Terms are word pieces of code identifiers. A term counts as found when a
//! comment word equals it or its embedding is closer than the similarity
//! threshold; the score is the found share of total term weight.

mod embeddings;
mod weights;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use embeddings::{NoEmbeddings, WordEmbeddings, WordVectors};
pub use weights::{FileWeights, SidecarWeights, TermWeighter, UniformWeights};

use crate::corpus::Language;
use crate::docparse::ParsedFunction;
use crate::error::{Error, Result};
use crate::similarity::cosine;
use crate::text::Lexicon;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub surface: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermMatchReport {
    pub terms: Vec<Term>,
    pub found: BTreeSet<String>,
    pub score: f64,
    /// Terms matched by exact string only because they have no vector.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing_embeddings: Vec<String>,
}

pub fn extract_terms(code: &str, language: Language, lexicon: &Lexicon) -> Result<Vec<String>> {
    let parsed = ParsedFunction::parse(code, language)?;
    Ok(lexicon.identifier_terms(parsed.identifiers()))
}

pub(crate) const ALL_ZERO_WEIGHTS: &str = "all term weights are zero";

/// Attaches normalized weights to `terms`. Terms the provider weighs at
/// zero are dropped; an all-zero answer is an error.
pub fn weigh_terms(
    code: &str,
    language: Language,
    terms: &[String],
    provider: &dyn TermWeighter,
) -> Result<Vec<Term>> {
    if terms.is_empty() {
        return Ok(Vec::new());
    }
    let raw = provider.raw_weights(code, language, terms)?;
    if raw.len() != terms.len() {
        return Err(Error::provider(
            provider.name(),
            format!("{} weights for {} terms", raw.len(), terms.len()),
        ));
    }
    if let Some((i, w)) = raw
        .iter()
        .enumerate()
        .find(|(_, w)| !w.is_finite() || **w < 0.0)
    {
        return Err(Error::provider(
            provider.name(),
            format!("invalid weight {w} for term {:?}", terms[i]),
        ));
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::provider(provider.name(), ALL_ZERO_WEIGHTS));
    }
    Ok(terms
        .iter()
        .zip(raw)
        .filter(|(_, w)| *w > 0.0)
        .map(|(t, w)| Term {
            surface: t.clone(),
            weight: w / total,
        })
        .collect())
}

pub fn informativeness(
    terms: &[Term],
    comment: &str,
    embeddings: &dyn WordEmbeddings,
    threshold: f64,
    lexicon: &Lexicon,
) -> TermMatchReport {
    let words = lexicon.text_words(comment);
    let word_vectors: Vec<&[f32]> = words.iter().filter_map(|w| embeddings.vector(w)).collect();

    let mut found = BTreeSet::new();
    let mut missing_embeddings = Vec::new();
    for term in terms {
        let hit = words.contains(&term.surface)
            || match embeddings.vector(&term.surface) {
                Some(tv) => word_vectors.iter().any(|wv| cosine(tv, wv) > threshold),
                None => {
                    missing_embeddings.push(term.surface.clone());
                    false
                }
            };
        if hit {
            found.insert(term.surface.clone());
        }
    }

    let score = if terms.is_empty() {
        1.0
    } else {
        let total = terms.iter().fold(0.0, |acc, t| acc + t.weight);
        let hit = terms
            .iter()
            .filter(|t| found.contains(&t.surface))
            .fold(0.0, |acc, t| acc + t.weight);
        if total > 0.0 {
            (hit / total).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };

    TermMatchReport {
        terms: terms.to_vec(),
        found,
        score,
        missing_embeddings,
    }
}

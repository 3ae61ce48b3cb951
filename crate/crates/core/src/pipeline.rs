//! Per-pair computation of the four components.

use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{description_length, FeatureVector};
use crate::completeness::{completeness, completeness_go};
use crate::config::{build_text_embedder, build_weighter, build_word_embeddings, RunConfig};
use crate::corpus::{CodeCommentPair, Language};
use crate::docparse::{parse_comment, ParsedFunction};
use crate::error::{Error, Result};
use crate::informativeness::{
    informativeness, weigh_terms, TermWeighter, UniformWeights, WordEmbeddings, ALL_ZERO_WEIGHTS,
};
use crate::relevance::{EmbedItem, TextEmbedder};
use crate::text::Lexicon;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub id: String,
    pub features: FeatureVector,
    /// Set when the code could not be parsed; completeness and
    /// informativeness are then scored 0.
    pub flagged: bool,
    pub diagnostics: Vec<String>,
}

pub struct Scorer {
    lexicon: Lexicon,
    weighter: Box<dyn TermWeighter>,
    embeddings: Box<dyn WordEmbeddings>,
    embedder: Box<dyn TextEmbedder>,
    similarity_threshold: f64,
}

impl Scorer {
    pub fn new(
        lexicon: Lexicon,
        weighter: Box<dyn TermWeighter>,
        embeddings: Box<dyn WordEmbeddings>,
        embedder: Box<dyn TextEmbedder>,
        similarity_threshold: f64,
    ) -> Self {
        Scorer {
            lexicon,
            weighter,
            embeddings,
            embedder,
            similarity_threshold,
        }
    }

    /// Builds all providers named in `config`; failures are config errors.
    pub fn from_config(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let mut lexicon = Lexicon::bundled().clone();
        for p in &config.lemma_files {
            lexicon
                .load_lemma_file(p)
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        for p in &config.stopword_files {
            lexicon
                .load_stopword_file(p)
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(Scorer::new(
            lexicon,
            build_weighter(&config.weight_spec()?)?,
            build_word_embeddings(&config.embed_spec()?)?,
            build_text_embedder(&config.relevance_spec()?)?,
            config.similarity_threshold,
        ))
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Scores pairs in parallel on the current rayon pool, keeping input order.
    /// Code and comment embeddings are requested in one call per batch.
    pub fn score_batch(&self, pairs: &[CodeCommentPair]) -> Result<Vec<PairScore>> {
        if pairs.is_empty() {
            return Ok(Vec::new());
        }
        let mut items = Vec::with_capacity(2 * pairs.len());
        for p in pairs {
            items.push(EmbedItem::code_of(p));
            items.push(EmbedItem::comment_of(p));
        }
        let vectors = self.embedder.embed(&items)?;
        if vectors.len() != items.len() {
            return Err(Error::provider(
                self.embedder.name(),
                "vector count differs from request",
            ));
        }
        pairs
            .par_iter()
            .zip(vectors.par_chunks(2))
            .map(|(pair, v)| {
                let r = v[0]
                    .cosine(&v[1])
                    .map_err(|e| Error::provider(self.embedder.name(), e.to_string()))?;
                self.score_with_relevance(pair, r)
            })
            .collect()
    }

    pub fn score(&self, pair: &CodeCommentPair) -> Result<PairScore> {
        Ok(self.score_batch(std::slice::from_ref(pair))?.remove(0))
    }

    fn score_with_relevance(&self, pair: &CodeCommentPair, relevance: f64) -> Result<PairScore> {
        let doc = parse_comment(&pair.comment, pair.language);
        let d = description_length(&doc).total as f64;
        let mut diagnostics: Vec<String> = doc.diagnostics.clone();

        let parsed = match ParsedFunction::parse(&pair.code, pair.language) {
            Ok(p) => p,
            Err(e @ (Error::Parse { .. } | Error::Definition { .. })) => {
                diagnostics.push(e.to_string());
                return Ok(PairScore {
                    id: pair.id.clone(),
                    features: FeatureVector::new(0.0, 0.0, d, relevance),
                    flagged: true,
                    diagnostics,
                });
            }
            Err(e) => return Err(e),
        };
        let elements = parsed.elements();

        let c = if pair.language == Language::Go {
            completeness_go(&pair.comment, &elements.function_name)
        } else {
            completeness(&elements, &doc, pair.language)?
        };
        diagnostics.extend(c.diagnostics);

        let surfaces = self.lexicon.identifier_terms(parsed.identifiers());
        let terms = match weigh_terms(&pair.code, pair.language, &surfaces, self.weighter.as_ref())
        {
            Ok(t) => t,
            Err(Error::Provider { message, .. }) if message == ALL_ZERO_WEIGHTS => {
                diagnostics.push(format!(
                    "{} gave every term zero weight; using uniform weights",
                    self.weighter.name()
                ));
                weigh_terms(&pair.code, pair.language, &surfaces, &UniformWeights)?
            }
            Err(e) => return Err(e),
        };
        let report = informativeness(
            &terms,
            &pair.comment,
            self.embeddings.as_ref(),
            self.similarity_threshold,
            &self.lexicon,
        );

        Ok(PairScore {
            id: pair.id.clone(),
            features: FeatureVector::new(c.score, report.score, d, relevance),
            flagged: false,
            diagnostics,
        })
    }
}

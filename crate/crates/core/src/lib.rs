//! Reference-free quality scoring for structured code comments.
//!
//! Each code/comment pair gets four component scores: completeness of the
//! structured documentation, informativeness of the prose relative to the
//! code's identifiers, description length, and code/comment relevance. A
//! trained classifier maps them to the probability that the comment is good,
//! which drives corpus filtering.

pub mod classifier;
pub mod commands;
pub mod completeness;
pub mod config;
pub mod corpus;
pub mod docparse;
pub mod error;
pub mod evaluation;
pub mod informativeness;
pub mod pipeline;
pub mod relevance;
pub mod sidecar;
pub mod similarity;
pub mod text;

pub use classifier::{FeatureVector, ModelKind, QualityModel};
pub use corpus::{CodeCommentPair, Language, ScoredPair};
pub use error::{Error, Result};
pub use pipeline::{PairScore, Scorer};

//! Computes code-comment relevance and mines hard negatives: for each
//! function, the other comments that look most like its documentation.

use cidre::relevance::{mine_hard_negatives, pair_relevance, HashEmbedder};
use cidre::{CodeCommentPair, Language};

fn pair(id: &str, code: &str, comment: &str) -> CodeCommentPair {
    CodeCommentPair {
        id: id.into(),
        language: Language::Python,
        code: code.into(),
        comment: comment.into(),
        label: None,
    }
}

fn main() -> cidre::Result<()> {
    let pairs = [
        pair(
            "open",
            "def open_file(path): return open(path)",
            "Open the file at path.",
        ),
        pair(
            "read",
            "def read_file(path): return open(path).read()",
            "Read the whole file.",
        ),
        pair(
            "sum",
            "def total(values): return sum(values)",
            "Sum of the values.",
        ),
        pair(
            "mean",
            "def mean(values): return total(values) / len(values)",
            "Average of values.",
        ),
    ];
    let embedder = HashEmbedder::default();
    for p in &pairs {
        println!("relevance {:5} {:.3}", p.id, pair_relevance(p, &embedder)?);
    }
    for t in mine_hard_negatives(&pairs, &embedder, 2, 0.0)? {
        println!(
            "{} vs comment of {} ({:.3})",
            t.anchor_id, t.negative_id, t.similarity
        );
    }
    Ok(())
}

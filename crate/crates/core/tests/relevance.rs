mod common;

use cidre::relevance::{
    mine_hard_negatives, relevance, DenseVector, EmbedItem, FileEmbedder, HashEmbedder,
    TextEmbedder,
};
use cidre::Result;
use proptest::prelude::*;

#[test]
fn miner_matches_exhaustive_scan() {
    let n = common::miner_vs_exhaustive(200, 31).unwrap();
    assert!(n > 0);
}

#[test]
fn k_and_floor_bound_the_output() {
    let pairs = common::random_corpus(12, 2);
    let p = HashEmbedder::new(16);
    let all = mine_hard_negatives(&pairs, &p, 50, -1.0).unwrap();
    for pair in &pairs {
        let mine: Vec<_> = all.iter().filter(|r| r.anchor_id == pair.id).collect();
        assert!(mine.len() <= 11);
        assert!(mine.windows(2).all(|w| w[0].similarity >= w[1].similarity));
        assert!(mine.iter().all(|r| r.negative_id != pair.id));
    }
    let high = mine_hard_negatives(&pairs, &p, 3, 0.9).unwrap();
    assert!(high.iter().all(|r| r.similarity > 0.9));
}

/// Multiplies another provider's vectors by a constant.
struct Scaled<P>(P, f64);

impl<P: TextEmbedder> TextEmbedder for Scaled<P> {
    fn name(&self) -> String {
        "scaled".into()
    }
    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<DenseVector>> {
        Ok(self
            .0
            .embed(items)?
            .into_iter()
            .map(|v| DenseVector::new(v.values().iter().map(|x| x * self.1).collect()))
            .collect())
    }
}

#[test]
fn vectors_from_file_drive_pair_relevance() {
    let text = "3 2\nq#code 1 1\nq#comment 1 0\nr#code 0 1\n";
    let p = FileEmbedder::from_reader("inline", text.as_bytes()).unwrap();
    let pair = cidre::CodeCommentPair {
        id: "q".into(),
        language: cidre::Language::Go,
        code: "func Q() {}".into(),
        comment: "Q does.".into(),
        label: None,
    };
    let r = cidre::relevance::pair_relevance(&pair, &p).unwrap();
    assert!((r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
}

proptest! {
    #[test]
    fn self_relevance_is_one(text in "[a-z]{2,8}( [a-z]{2,8}){0,6}") {
        let r = relevance(&text, &text, &HashEmbedder::default()).unwrap();
        prop_assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scale_invariance(a in "[a-z]{2,6}( [a-z]{2,6}){0,5}", b in "[a-z]{2,6}( [a-z]{2,6}){0,5}", k in 0.01f64..100.0) {
        let base = relevance(&a, &b, &HashEmbedder::default()).unwrap();
        let scaled = relevance(&a, &b, &Scaled(HashEmbedder::default(), k)).unwrap();
        prop_assert!((base - scaled).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&base));
    }
}

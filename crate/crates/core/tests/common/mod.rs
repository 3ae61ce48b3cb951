//! Oracles and fixtures shared by the integration tests and the acceptance
//! runner. Each oracle is written independently of the library code it checks.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use cidre::classifier::FeatureVector;
use cidre::completeness::{completeness, completeness_go};
use cidre::docparse::{extract_code_elements, parse_comment};
use cidre::relevance::{EmbedItem, TextEmbedder, TripletRecord};
use cidre::{CodeCommentPair, Language};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[derive(Debug, Deserialize)]
pub struct CompletenessCase {
    pub name: String,
    pub language: Language,
    pub code: String,
    pub comment: String,
    pub overall: u32,
    pub available: u32,
}

pub fn completeness_cases() -> Vec<CompletenessCase> {
    let text = std::fs::read_to_string(fixture("completeness_cases.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Checks one hand-computed case; the expected ratio is derived from the
/// hand counts, with an empty denominator scoring 1 outside Go.
pub fn check_completeness(case: &CompletenessCase) -> Result<(), String> {
    let elements = extract_code_elements(&case.code, case.language).map_err(|e| e.to_string())?;
    let got = if case.language == Language::Go {
        completeness_go(&case.comment, &elements.function_name)
    } else {
        let doc = parse_comment(&case.comment, case.language);
        completeness(&elements, &doc, case.language).map_err(|e| e.to_string())?
    };
    // Go scores are the prefix indicator itself.
    let expected = if case.language == Language::Go {
        f64::from(case.available)
    } else if case.overall == 0 {
        1.0
    } else {
        f64::from(case.available) / f64::from(case.overall)
    };
    if got.overall != case.overall || got.available != case.available {
        return Err(format!(
            "{}: counts {}/{} expected {}/{}",
            case.name, got.available, got.overall, case.available, case.overall
        ));
    }
    if (got.score - expected).abs() > 1e-12 {
        return Err(format!(
            "{}: score {} expected {}",
            case.name, got.score, expected
        ));
    }
    Ok(())
}

/// Counts terms that appear verbatim in the comment word set, by linear scan.
pub fn brute_found_ratio(terms: &[String], comment_words: &[String]) -> f64 {
    if terms.is_empty() {
        return 1.0;
    }
    let mut found = 0usize;
    for t in terms {
        let mut hit = false;
        for w in comment_words {
            if w == t {
                hit = true;
            }
        }
        found += usize::from(hit);
    }
    found as f64 / terms.len() as f64
}

/// Two-sided exact p by enumerating every assignment of the pooled values
/// to the first group.
pub fn permutation_p(bad: &[f64], good: &[f64]) -> f64 {
    let pooled: Vec<f64> = bad.iter().chain(good).copied().collect();
    let n = pooled.len();
    let m = bad.len();
    let u_of = |mask: u32| -> f64 {
        let mut u = 0.0;
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    continue;
                }
                if pooled[i] > pooled[j] {
                    u += 1.0;
                } else if pooled[i] == pooled[j] {
                    u += 0.5;
                }
            }
        }
        u
    };
    let observed = u_of((1u32 << m) - 1);
    let (mut total, mut le, mut ge) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let u = u_of(mask);
        total += 1;
        le += u64::from(u <= observed);
        ge += u64::from(u >= observed);
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

/// Scans every (anchor, candidate) pair and keeps, per anchor, the k most
/// similar other comments above the floor; equal similarities keep corpus order.
pub fn exhaustive_negatives(
    pairs: &[CodeCommentPair],
    provider: &dyn TextEmbedder,
    k: usize,
    min_similarity: f64,
) -> Vec<TripletRecord> {
    let mut out = Vec::new();
    for (i, anchor) in pairs.iter().enumerate() {
        let a = provider
            .embed(&[EmbedItem::code_of(anchor)])
            .unwrap()
            .remove(0);
        let mut chosen: Vec<(usize, f64)> = Vec::new();
        let mut used = BTreeSet::new();
        for _ in 0..k {
            let mut best: Option<(usize, f64)> = None;
            for (j, other) in pairs.iter().enumerate() {
                if j == i || used.contains(&j) {
                    continue;
                }
                let c = provider
                    .embed(&[EmbedItem::comment_of(other)])
                    .unwrap()
                    .remove(0);
                let dot: f64 = a.values().iter().zip(c.values()).map(|(x, y)| x * y).sum();
                let na = a.values().iter().map(|x| x * x).sum::<f64>().sqrt();
                let nc = c.values().iter().map(|x| x * x).sum::<f64>().sqrt();
                let sim = if na == 0.0 || nc == 0.0 {
                    0.0
                } else {
                    dot / (na * nc)
                };
                if sim <= min_similarity {
                    continue;
                }
                if best.is_none_or(|(_, s)| sim > s) {
                    best = Some((j, sim));
                }
            }
            match best {
                Some((j, s)) => {
                    used.insert(j);
                    chosen.push((j, s));
                }
                None => break,
            }
        }
        for (j, s) in chosen {
            out.push(TripletRecord {
                anchor_id: anchor.id.clone(),
                positive_id: anchor.id.clone(),
                negative_id: pairs[j].id.clone(),
                similarity: s,
            });
        }
    }
    out
}

const WORDS: &[&str] = &[
    "load", "file", "path", "read", "write", "user", "name", "score", "player", "count", "list",
    "item",
];

/// Small random corpus whose texts share vocabulary, so hash embeddings overlap.
pub fn random_corpus(n: usize, seed: u64) -> Vec<CodeCommentPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = |len: usize| -> String {
        (0..len)
            .map(|_| WORDS[rng.random_range(0..WORDS.len())])
            .collect::<Vec<_>>()
            .join(" ")
    };
    (0..n)
        .map(|i| CodeCommentPair {
            id: format!("p{i}"),
            language: Language::Python,
            code: format!("def f(x):\n    return {}\n", words(3)),
            comment: words(4),
            label: None,
        })
        .collect()
}

/// Labels follow the sign of (completeness − 0.5). The other features are
/// noise on their natural scales.
pub fn separable(n: usize, seed: u64) -> (Vec<FeatureVector>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let good = i % 2 == 0;
        let c = if good {
            rng.random_range(0.55..1.0)
        } else {
            rng.random_range(0.0..0.45)
        };
        xs.push(FeatureVector::new(
            c,
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..400.0),
            rng.random_range(-1.0..1.0),
        ));
        ys.push(good);
    }
    (xs, ys)
}

/// Label is the sign of the sum of the four standardized features, with
/// every feature on its own scale.
pub fn all_feature_data(n: usize, seed: u64) -> (Vec<FeatureVector>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let z: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        xs.push(FeatureVector::new(
            0.5 + 0.4 * z[0],
            0.5 + 0.4 * z[1],
            200.0 + 150.0 * z[2],
            0.8 * z[3],
        ));
        ys.push(z.iter().sum::<f64>() > 0.0);
    }
    (xs, ys)
}

use cidre::informativeness::{informativeness, NoEmbeddings, Term, WordVectors};
use cidre::text::Lexicon;

const PLAIN: &[&str] = &[
    "alpha", "bravo", "charlie", "delta", "golf", "hotel", "india", "juliet", "kilo", "lima",
];

fn plain_words() -> Vec<&'static str> {
    let lex = Lexicon::bundled();
    for w in PLAIN {
        assert_eq!(lex.lemma(w), *w, "fixture word {w} must be its own lemma");
        assert!(!lex.is_stopword(w));
    }
    PLAIN.to_vec()
}

fn sample<'a>(rng: &mut ChaCha8Rng, words: &[&'a str], max: usize) -> Vec<&'a str> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|_| words[rng.random_range(0..words.len())])
        .collect()
}

/// Uniform-weight scores against the verbatim counter on `cases` random fixtures.
pub fn informativeness_vs_brute(cases: usize, seed: u64) -> Result<(), String> {
    let words = plain_words();
    let lex = Lexicon::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let mut term_set: Vec<String> = sample(&mut rng, &words, 6)
            .iter()
            .map(|s| s.to_string())
            .collect();
        term_set.sort();
        term_set.dedup();
        let comment_words: Vec<String> = sample(&mut rng, &words, 8)
            .iter()
            .map(|s| s.to_string())
            .collect();
        let comment = comment_words.join(" ");
        let terms: Vec<Term> = term_set
            .iter()
            .map(|t| Term {
                surface: t.clone(),
                weight: 1.0 / term_set.len() as f64,
            })
            .collect();
        let got = informativeness(&terms, &comment, &NoEmbeddings, 0.5, lex).score;
        let want = brute_found_ratio(&term_set, &comment_words);
        if (got - want).abs() > 1e-12 {
            return Err(format!(
                "case {case}: terms {term_set:?}, comment {comment:?}: {got} vs {want}"
            ));
        }
    }
    Ok(())
}

/// Raising the threshold never raises the score; raising the weight of a
/// found (missing) term never lowers (raises) it.
pub fn informativeness_monotonicity(cases: usize, seed: u64) -> Result<(), String> {
    let words = plain_words();
    let lex = Lexicon::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let mut vectors = WordVectors::new(3);
        for w in &words {
            let v: Vec<f32> = (0..3).map(|_| rng.random_range(-1.0f32..1.0)).collect();
            vectors
                .insert(&format!("/c/en/{w}"), &v)
                .map_err(|e| e.to_string())?;
        }
        let mut surfaces: Vec<&str> = sample(&mut rng, &words, 5);
        surfaces.sort();
        surfaces.dedup();
        if surfaces.is_empty() {
            surfaces.push(words[0]);
        }
        let terms: Vec<Term> = surfaces
            .iter()
            .map(|s| Term {
                surface: s.to_string(),
                weight: rng.random_range(0.05..1.0),
            })
            .collect();
        let comment = sample(&mut rng, &words, 4).join(" ");
        let t1 = rng.random_range(-0.9..0.9);
        let t2 = rng.random_range(t1..0.95);
        let lo = informativeness(&terms, &comment, &vectors, t1, lex);
        let hi = informativeness(&terms, &comment, &vectors, t2, lex);
        if hi.score > lo.score + 1e-12 {
            return Err(format!(
                "case {case}: threshold {t1} -> {t2} raised score {} -> {}",
                lo.score, hi.score
            ));
        }
        let k = rng.random_range(0..terms.len());
        let mut heavier = terms.clone();
        heavier[k].weight *= rng.random_range(1.5..10.0);
        let after = informativeness(&heavier, &comment, &vectors, t1, lex).score;
        let was_found = lo.found.contains(&terms[k].surface);
        let ok = if was_found {
            after >= lo.score - 1e-12
        } else {
            after <= lo.score + 1e-12
        };
        if !ok {
            return Err(format!(
                "case {case}: weighting {} (found: {was_found}) moved score {} -> {after}",
                terms[k].surface, lo.score
            ));
        }
    }
    Ok(())
}

use cidre::evaluation::mann_whitney;

/// Distinct values in random order so the exact path is taken.
fn distinct_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut pool: Vec<f64> = (0..n)
        .map(|i| i as f64 + rng.random_range(0.0..0.5))
        .collect();
    for i in (1..pool.len()).rev() {
        let j = rng.random_range(0..=i);
        pool.swap(i, j);
    }
    pool
}

/// Compares exact p with the permutation oracle for every pair of group
/// sizes up to `max`, `rounds` random draws each.
pub fn mann_whitney_vs_permutation(max: usize, rounds: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for m in 1..=max {
        for n in 1..=max {
            for _ in 0..rounds {
                let pool = distinct_values(&mut rng, m + n);
                let (bad, good) = pool.split_at(m);
                let r = mann_whitney(bad, good).map_err(|e| e.to_string())?;
                let want = permutation_p(bad, good);
                if !r.exact || (r.p_value - want).abs() > 1e-12 {
                    return Err(format!(
                        "{bad:?} vs {good:?}: {} (exact {}) vs {want}",
                        r.p_value, r.exact
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Components drawn so that good comments score higher on all four, as in
/// the reported group comparison.
pub fn shifted_groups(n_per_group: usize, seed: u64) -> (Vec<FeatureVector>, Vec<bool>) {
    use rand_distr::{Distribution, Normal};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comp = |mu: f64| Normal::new(mu, 0.2).unwrap();
    let len = |mu: f64| Normal::new(mu, 60.0).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for good in [false, true] {
        let shift = if good { 1.0 } else { 0.0 };
        for _ in 0..n_per_group {
            xs.push(FeatureVector::new(
                comp(0.4 + 0.2 * shift).sample(&mut rng).clamp(0.0, 1.0),
                comp(0.3 + 0.15 * shift).sample(&mut rng).clamp(0.0, 1.0),
                len(120.0 + 60.0 * shift).sample(&mut rng).max(0.0),
                comp(0.2 + 0.15 * shift).sample(&mut rng).clamp(-1.0, 1.0),
            ));
            ys.push(good);
        }
    }
    (xs, ys)
}

/// Miner against the exhaustive scan on `corpora` random corpora of 2..=20 pairs.
pub fn miner_vs_exhaustive(corpora: usize, seed: u64) -> Result<usize, String> {
    use cidre::relevance::{
        mine_hard_negatives, HashEmbedder, DEFAULT_MINING_K, DEFAULT_MIN_SIMILARITY,
    };
    let provider = HashEmbedder::new(16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = 0;
    for case in 0..corpora {
        let n = rng.random_range(2..=20);
        let pairs = random_corpus(n, rng.random());
        let got = mine_hard_negatives(&pairs, &provider, DEFAULT_MINING_K, DEFAULT_MIN_SIMILARITY)
            .map_err(|e| e.to_string())?;
        let want =
            exhaustive_negatives(&pairs, &provider, DEFAULT_MINING_K, DEFAULT_MIN_SIMILARITY);
        if got.len() != want.len() {
            return Err(format!(
                "case {case}: {} records vs {}",
                got.len(),
                want.len()
            ));
        }
        for (g, w) in got.iter().zip(&want) {
            if g.anchor_id != w.anchor_id
                || g.negative_id != w.negative_id
                || g.positive_id != w.positive_id
                || (g.similarity - w.similarity).abs() > 1e-12
            {
                return Err(format!("case {case}: {g:?} vs {w:?}"));
            }
        }
        records += got.len();
    }
    Ok(records)
}

//! Statistical checks on scored corpora: Mann-Whitney tests per component,
//! cross-entropy, F1, and the feature-subset ablation runner.

mod mann_whitney;

pub use mann_whitney::{mann_whitney, MWTestResult};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{train, Feature, FeatureMask, FeatureVector, ModelKind, TrainParams};
use crate::error::{Error, Result};

pub const DEFAULT_CE_EPSILON: f64 = 1e-15;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

fn check_lengths(labels: usize, probs: usize) -> Result<()> {
    if labels != probs {
        return Err(Error::invalid(format!(
            "{labels} labels for {probs} probabilities"
        )));
    }
    Ok(())
}

/// Mean binary log-loss with probabilities clipped to `[eps, 1 - eps]`.
pub fn cross_entropy(labels: &[bool], probabilities: &[f64], eps: f64) -> Result<f64> {
    check_lengths(labels.len(), probabilities.len())?;
    if labels.is_empty() {
        return Err(Error::invalid("cross-entropy of an empty sample"));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!(
            "clip epsilon {eps} outside (0, 0.5)"
        )));
    }
    let mut total = 0.0;
    for (&y, &p) in labels.iter().zip(probabilities) {
        if !p.is_finite() {
            return Err(Error::invalid(format!("non-finite probability {p}")));
        }
        let p = p.clamp(eps, 1.0 - eps);
        total -= if y { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(total / labels.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

/// Counts with class 1 predicted iff `p > threshold`.
pub fn confusion(labels: &[bool], probabilities: &[f64], threshold: f64) -> Result<Confusion> {
    check_lengths(labels.len(), probabilities.len())?;
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 0,
    };
    for (&y, &p) in labels.iter().zip(probabilities) {
        match (y, p > threshold) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// F1 of class 1; zero when precision and recall are both zero.
pub fn f1(labels: &[bool], probabilities: &[f64], threshold: f64) -> Result<f64> {
    let c = confusion(labels, probabilities, threshold)?;
    let denom = 2 * c.tp + c.fp + c.fn_;
    Ok(if c.tp == 0 {
        0.0
    } else {
        2.0 * c.tp as f64 / denom as f64
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub eval: Vec<usize>,
    pub seed: u64,
}

/// Stratified shuffle split. Each class keeps at least one example on both sides.
pub fn stratified_split(labels: &[bool], train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut eval_idx = Vec::new();
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < 2 {
            return Err(Error::invalid(format!(
                "class {} has {} examples; a split needs at least 2",
                u8::from(class),
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        let n_train =
            ((idx.len() as f64 * train_fraction).round() as usize).clamp(1, idx.len() - 1);
        train_idx.extend_from_slice(&idx[..n_train]);
        eval_idx.extend_from_slice(&idx[n_train..]);
    }
    train_idx.sort_unstable();
    eval_idx.sort_unstable();
    Ok(Split {
        train: train_idx,
        eval: eval_idx,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub subset: String,
    pub features: FeatureMask,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationTable {
    pub kind: ModelKind,
    pub seed: u64,
    pub n_train: usize,
    pub n_eval: usize,
    pub rows: Vec<AblationRow>,
}

impl AblationTable {
    pub fn best(&self) -> Option<&AblationRow> {
        self.rows.iter().max_by(|a, b| {
            a.f1.total_cmp(&b.f1)
                .then(a.features.len().cmp(&b.features.len()))
        })
    }

    pub fn get(&self, mask: &FeatureMask) -> Option<f64> {
        self.rows.iter().find(|r| &r.features == mask).map(|r| r.f1)
    }
}

/// Trains one model per non-empty feature subset on `split.train` and scores
/// F1 on `split.eval`.
pub fn run_ablation(
    features: &[FeatureVector],
    labels: &[bool],
    split: &Split,
    params: &TrainParams,
) -> Result<AblationTable> {
    check_lengths(labels.len(), features.len())?;
    for (name, part) in [("train", &split.train), ("eval", &split.eval)] {
        if let Some(&i) = part.iter().find(|&&i| i >= labels.len()) {
            return Err(Error::invalid(format!("{name} index {i} out of range")));
        }
        let pos = part.iter().filter(|&&i| labels[i]).count();
        if pos == 0 || pos == part.len() {
            return Err(Error::invalid(format!(
                "{name} half must contain both classes"
            )));
        }
    }
    let pick = |idx: &[usize]| -> (Vec<FeatureVector>, Vec<bool>) {
        idx.iter().map(|&i| (features[i], labels[i])).unzip()
    };
    let (train_x, train_y) = pick(&split.train);
    let (eval_x, eval_y) = pick(&split.eval);

    let rows = FeatureMask::all_subsets()
        .into_par_iter()
        .enumerate()
        .map(|(k, mask)| {
            let p = TrainParams {
                feature_mask: mask.clone(),
                seed: params.seed.wrapping_add(k as u64),
                ..params.clone()
            };
            let model = train(&train_x, &train_y, &p)?;
            let probs = eval_x
                .iter()
                .map(|x| model.predict(x))
                .collect::<Result<Vec<_>>>()?;
            Ok(AblationRow {
                subset: mask.to_string(),
                f1: f1(&eval_y, &probs, 0.5)?,
                features: mask,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AblationTable {
        kind: params.kind,
        seed: params.seed,
        n_train: split.train.len(),
        n_eval: split.eval.len(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentTest {
    pub feature: Feature,
    pub mean_bad: f64,
    pub mean_good: f64,
    #[serde(flatten)]
    pub test: MWTestResult,
}

/// Mann-Whitney test of each component between bad and good comments.
pub fn component_tests(features: &[FeatureVector], labels: &[bool]) -> Result<Vec<ComponentTest>> {
    check_lengths(labels.len(), features.len())?;
    Feature::ALL
        .iter()
        .map(|&f| {
            let (good, bad): (Vec<_>, Vec<_>) = features
                .iter()
                .zip(labels)
                .map(|(x, &y)| (x.get(f), y))
                .partition(|(_, y)| *y);
            let good: Vec<f64> = good.into_iter().map(|(v, _)| v).collect();
            let bad: Vec<f64> = bad.into_iter().map(|(v, _)| v).collect();
            let test = mann_whitney(&bad, &good)?;
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            Ok(ComponentTest {
                feature: f,
                mean_bad: mean(&bad),
                mean_good: mean(&good),
                test,
            })
        })
        .collect()
}

//! Fusion of the four component scores into the probability that a comment
//! is good.
//!
//! Two model kinds are supported: logistic regression and an RBF-kernel SVM
//! whose decision values are Platt-calibrated. Features are always z-scored
//! with training statistics first; description length lives on a scale of
//! hundreds while the other components stay near [0, 1].

mod logistic;
mod platt;
pub mod svm;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub completeness: f64,
    pub informativeness: f64,
    pub description_length: f64,
    pub relevance: f64,
}

impl FeatureVector {
    pub fn new(
        completeness: f64,
        informativeness: f64,
        description_length: f64,
        relevance: f64,
    ) -> Self {
        FeatureVector {
            completeness,
            informativeness,
            description_length,
            relevance,
        }
    }

    pub fn get(&self, feature: Feature) -> f64 {
        match feature {
            Feature::Completeness => self.completeness,
            Feature::Informativeness => self.informativeness,
            Feature::DescriptionLength => self.description_length,
            Feature::Relevance => self.relevance,
        }
    }

    pub fn set(&mut self, feature: Feature, value: f64) {
        match feature {
            Feature::Completeness => self.completeness = value,
            Feature::Informativeness => self.informativeness = value,
            Feature::DescriptionLength => self.description_length = value,
            Feature::Relevance => self.relevance = value,
        }
    }

    pub fn is_finite(&self) -> bool {
        Feature::ALL.iter().all(|&f| self.get(f).is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Completeness,
    Informativeness,
    DescriptionLength,
    Relevance,
}

impl Feature {
    pub const ALL: [Feature; 4] = [
        Feature::Completeness,
        Feature::Informativeness,
        Feature::DescriptionLength,
        Feature::Relevance,
    ];

    pub fn short(self) -> char {
        match self {
            Feature::Completeness => 'C',
            Feature::Informativeness => 'I',
            Feature::DescriptionLength => 'D',
            Feature::Relevance => 'R',
        }
    }
}

/// Non-empty, canonically ordered subset of the four features.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Feature>", into = "Vec<Feature>")]
pub struct FeatureMask(Vec<Feature>);

impl FeatureMask {
    pub fn all() -> Self {
        FeatureMask(Feature::ALL.to_vec())
    }

    pub fn new(features: impl IntoIterator<Item = Feature>) -> Result<Self> {
        let mut fs: Vec<Feature> = features.into_iter().collect();
        fs.sort();
        fs.dedup();
        if fs.is_empty() {
            return Err(Error::invalid("feature mask must not be empty"));
        }
        Ok(FeatureMask(fs))
    }

    /// All 15 non-empty subsets, ordered by size then lexicographically.
    pub fn all_subsets() -> Vec<FeatureMask> {
        let mut out: Vec<FeatureMask> = (1u8..16)
            .map(|bits| {
                FeatureMask(
                    Feature::ALL
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| bits & (1 << i) != 0)
                        .map(|(_, f)| *f)
                        .collect(),
                )
            })
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    pub fn features(&self) -> &[Feature] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn select(&self, fv: &FeatureVector) -> Vec<f64> {
        self.0.iter().map(|&f| fv.get(f)).collect()
    }
}

impl TryFrom<Vec<Feature>> for FeatureMask {
    type Error = Error;
    fn try_from(v: Vec<Feature>) -> Result<Self> {
        FeatureMask::new(v)
    }
}

impl From<FeatureMask> for Vec<Feature> {
    fn from(m: FeatureMask) -> Self {
        m.0
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for feat in &self.0 {
            write!(f, "{}", feat.short())?;
        }
        Ok(())
    }
}

impl FromStr for FeatureMask {
    type Err = Error;
    /// Parses letter codes such as `CIDR` or `CR`.
    fn from_str(s: &str) -> Result<Self> {
        let fs = s
            .chars()
            .map(|c| {
                Feature::ALL
                    .into_iter()
                    .find(|f| f.short() == c.to_ascii_uppercase())
                    .ok_or_else(|| Error::invalid(format!("unknown feature code {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FeatureMask::new(fs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    fn fit(rows: &[Vec<f64>], mask: &FeatureMask) -> Result<Self> {
        let n = rows.len() as f64;
        let dim = mask.len();
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut std = vec![0.0; dim];
        for row in rows {
            for ((s, x), m) in std.iter_mut().zip(row).zip(&mean) {
                *s += (x - m) * (x - m);
            }
        }
        std.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        for (s, f) in std.iter().zip(mask.features()) {
            if *s <= 1e-12 {
                return Err(Error::invalid(format!(
                    "feature {f:?} is constant over the training data"
                )));
            }
        }
        Ok(Scaler { mean, std })
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logistic,
    SvmRbf,
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(ModelKind::Logistic),
            "svm_rbf" | "svm" => Ok(ModelKind::SvmRbf),
            other => Err(Error::invalid(format!("unknown model kind {other:?}"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Logistic => "logistic",
            ModelKind::SvmRbf => "svm_rbf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlattParams {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Logistic {
        weights: Vec<f64>,
        bias: f64,
    },
    SvmRbf {
        gamma: f64,
        /// In standardized coordinates.
        support_vectors: Vec<Vec<f64>>,
        /// αᵢ·yᵢ per support vector.
        dual_coef: Vec<f64>,
        bias: f64,
        platt: PlattParams,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub kind: ModelKind,
    pub feature_mask: FeatureMask,
    pub seed: u64,
    /// L2 penalty on the mean log-loss (logistic).
    pub l2: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Box constraint (SVM).
    pub c: f64,
    /// RBF width; `None` uses 1 / (n_features · variance of standardized data).
    pub gamma: Option<f64>,
    pub smo_tol: f64,
    pub smo_max_iter: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            kind: ModelKind::SvmRbf,
            feature_mask: FeatureMask::all(),
            seed: 0,
            l2: 1e-3,
            grad_tol: 1e-8,
            max_iter: 10_000,
            c: 1.0,
            gamma: None,
            smo_tol: 1e-3,
            smo_max_iter: 10_000_000,
        }
    }
}

impl TrainParams {
    pub fn with_kind(kind: ModelKind) -> Self {
        TrainParams {
            kind,
            ..TrainParams::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub hyperparams: TrainParams,
    pub seed: u64,
    pub n_train: usize,
    pub iterations: usize,
}

/// A trained classifier, serializable to the JSON model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityModel {
    #[serde(flatten)]
    pub params: ModelParams,
    pub feature_mask: FeatureMask,
    pub scaler: Scaler,
    pub meta: TrainingMeta,
}

// Keeps predictions strictly inside (0, 1).
const PROB_FLOOR: f64 = f64::EPSILON;

pub fn train(
    features: &[FeatureVector],
    labels: &[bool],
    params: &TrainParams,
) -> Result<QualityModel> {
    if features.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature vectors for {} labels",
            features.len(),
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = labels.len() - positives;
    if positives < 2 || negatives < 2 {
        return Err(Error::invalid(format!(
            "training needs at least 2 examples of each class (got {positives} good, {negatives} bad)"
        )));
    }
    if let Some(i) = features.iter().position(|f| !f.is_finite()) {
        return Err(Error::invalid(format!("non-finite feature in example {i}")));
    }
    let mask = &params.feature_mask;
    let raw: Vec<Vec<f64>> = features.iter().map(|f| mask.select(f)).collect();
    let scaler = Scaler::fit(&raw, mask)?;
    let rows: Vec<Vec<f64>> = raw.iter().map(|r| scaler.transform(r)).collect();

    let (model_params, iterations) = match params.kind {
        ModelKind::Logistic => {
            let fit = logistic::fit(&rows, labels, params.l2, params.grad_tol, params.max_iter);
            (
                ModelParams::Logistic {
                    weights: fit.weights,
                    bias: fit.bias,
                },
                fit.iterations,
            )
        }
        ModelKind::SvmRbf => {
            let gamma = params.gamma.unwrap_or_else(|| default_gamma(&rows));
            let sol = svm::solve(
                &rows,
                labels,
                params.c,
                gamma,
                params.smo_tol,
                params.smo_max_iter,
            );
            let mut support_vectors = Vec::new();
            let mut dual_coef = Vec::new();
            for ((row, &a), &y) in rows.iter().zip(&sol.alpha).zip(labels) {
                if a > 0.0 {
                    support_vectors.push(row.clone());
                    dual_coef.push(if y { a } else { -a });
                }
            }
            let bias = -sol.rho;
            let decisions: Vec<f64> = rows
                .iter()
                .map(|r| svm_decision(r, &support_vectors, &dual_coef, bias, gamma))
                .collect();
            let pf = platt::fit(&decisions, labels);
            (
                ModelParams::SvmRbf {
                    gamma,
                    support_vectors,
                    dual_coef,
                    bias,
                    platt: PlattParams { a: pf.a, b: pf.b },
                },
                sol.iterations,
            )
        }
    };
    Ok(QualityModel {
        params: model_params,
        feature_mask: mask.clone(),
        scaler,
        meta: TrainingMeta {
            hyperparams: params.clone(),
            seed: params.seed,
            n_train: features.len(),
            iterations,
        },
    })
}

fn default_gamma(rows: &[Vec<f64>]) -> f64 {
    let values: Vec<f64> = rows.iter().flatten().copied().collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let dim = rows.first().map_or(1, Vec::len) as f64;
    if var > 0.0 {
        1.0 / (dim * var)
    } else {
        1.0
    }
}

fn svm_decision(z: &[f64], svs: &[Vec<f64>], coef: &[f64], bias: f64, gamma: f64) -> f64 {
    svs.iter()
        .zip(coef)
        .map(|(sv, c)| c * svm::rbf(z, sv, gamma))
        .sum::<f64>()
        + bias
}

impl QualityModel {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::Logistic { .. } => ModelKind::Logistic,
            ModelParams::SvmRbf { .. } => ModelKind::SvmRbf,
        }
    }

    fn validate(&self) -> Result<()> {
        let dim = self.feature_mask.len();
        let bad = |what: &str| {
            Err(Error::Model(format!(
                "{what} does not match feature mask of {dim}"
            )))
        };
        if self.scaler.mean.len() != dim || self.scaler.std.len() != dim {
            return bad("scaler dimension");
        }
        if self.scaler.std.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::Model("scaler std must be positive".into()));
        }
        match &self.params {
            ModelParams::Logistic { weights, .. } => {
                if weights.len() != dim {
                    return bad("weight count");
                }
            }
            ModelParams::SvmRbf {
                support_vectors,
                dual_coef,
                platt,
                ..
            } => {
                if support_vectors.len() != dual_coef.len() {
                    return Err(Error::Model(
                        "support vector and dual coefficient counts differ".into(),
                    ));
                }
                if support_vectors.iter().any(|sv| sv.len() != dim) {
                    return bad("support vector dimension");
                }
                if !platt.b.is_finite() || !platt.a.is_finite() {
                    return Err(Error::Model("Platt coefficients must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Raw decision value: the logit for logistic, the SVM margin otherwise.
    pub fn decision(&self, features: &FeatureVector) -> Result<f64> {
        if !features.is_finite() {
            return Err(Error::invalid("non-finite feature"));
        }
        self.validate()?;
        let z = self.scaler.transform(&self.feature_mask.select(features));
        Ok(match &self.params {
            ModelParams::Logistic { weights, bias } => {
                z.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() + bias
            }
            ModelParams::SvmRbf {
                gamma,
                support_vectors,
                dual_coef,
                bias,
                ..
            } => svm_decision(&z, support_vectors, dual_coef, *bias, *gamma),
        })
    }

    pub fn predict(&self, features: &FeatureVector) -> Result<f64> {
        let d = self.decision(features)?;
        let p = match &self.params {
            ModelParams::Logistic { .. } => logistic::sigmoid(d),
            ModelParams::SvmRbf { platt, .. } => platt::probability(
                platt::PlattFit {
                    a: platt.a,
                    b: platt.b,
                },
                d,
            ),
        };
        Ok(p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Model(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let model: QualityModel = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." || path.is_empty() {
                Error::Model(inner.to_string())
            } else {
                Error::Model(format!("{path}: {inner}"))
            }
        })?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        QualityModel::from_json(&text)
    }
}

pub fn predict(model: &QualityModel, features: &FeatureVector) -> Result<f64> {
    model.predict(features)
}

/// Character count of the raw comment, with the leading free-text part
/// reported alongside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptionLength {
    pub total: usize,
    pub leading: usize,
}

pub fn description_length(doc: &crate::docparse::CommentDoc) -> DescriptionLength {
    DescriptionLength {
        total: doc.raw_length,
        leading: doc.leading_description.chars().count(),
    }
}

#[cfg(test)]
mod tests;

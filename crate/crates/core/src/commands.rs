//! Batch commands behind the `cidre` binary. Each returns a JSON summary;
//! [`run`] maps failures to exit codes (1 for bad data, 2 for bad
//! configuration or unreadable inputs).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::classifier::{train, FeatureVector, ModelKind, QualityModel, TrainParams};
use crate::config::{build_text_embedder, RunConfig};
use crate::corpus::{write_json_line, CodeCommentPair, CorpusReader, JsonLines, ScoredPair};
use crate::error::{Error, Result};
use crate::evaluation::{
    component_tests, confusion, cross_entropy, f1, run_ablation, stratified_split,
    DEFAULT_TRAIN_FRACTION,
};
use crate::pipeline::Scorer;
use crate::relevance::mine_hard_negatives;

/// Pairs scored per provider round-trip.
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub summary: Value,
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config(_) | Error::Io { .. } | Error::Model(_) => 2,
        _ => 1,
    }
}

/// Runs a command, timing it and converting errors into an outcome.
pub fn run(f: impl FnOnce() -> Result<Value>) -> CommandOutcome {
    let start = Instant::now();
    match f() {
        Ok(mut summary) => {
            if let Value::Object(map) = &mut summary {
                map.insert(
                    "elapsed_ms".into(),
                    json!(start.elapsed().as_millis() as u64),
                );
            }
            CommandOutcome {
                exit_code: 0,
                summary,
            }
        }
        Err(e) => CommandOutcome {
            exit_code: exit_code(&e),
            summary: json!({ "error": e.to_string() }),
        },
    }
}

/// Settings shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub config: RunConfig,
    pub seed: u64,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl Common {
    fn echo(&self) -> Value {
        json!({ "config": self.config, "seed": self.seed })
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            if j == 0 {
                return Err(Error::Config("--jobs must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(|e| Error::Config(e.to_string()))
    }
}

struct Output {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Output {
    fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Output {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    fn line<T: Serialize>(&mut self, item: &T) -> Result<()> {
        write_json_line(&mut self.out, item).map_err(|e| Error::io(&self.path, e))
    }

    fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

fn write_report(path: Option<&Path>, report: &Value) -> Result<()> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(report).expect("report serializes");
        std::fs::write(p, text + "\n").map_err(|e| Error::io(p, e))?;
    }
    Ok(())
}

/// Streams `corpus` through the scorer in chunks, handing each scored pair
/// to `sink` in input order.
fn score_stream(
    corpus: &Path,
    scorer: &Scorer,
    pool: &rayon::ThreadPool,
    mut sink: impl FnMut(CodeCommentPair, crate::pipeline::PairScore) -> Result<()>,
) -> Result<usize> {
    let mut reader = CorpusReader::open(corpus)?;
    let mut total = 0;
    loop {
        let chunk: Vec<CodeCommentPair> = reader.by_ref().take(CHUNK).collect::<Result<_>>()?;
        if chunk.is_empty() {
            return Ok(total);
        }
        total += chunk.len();
        let scores = pool.install(|| scorer.score_batch(&chunk))?;
        for (pair, score) in chunk.into_iter().zip(scores) {
            sink(pair, score)?;
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScoreArgs {
    pub corpus: PathBuf,
    pub model: PathBuf,
    pub out: PathBuf,
}

pub fn cmd_score(args: &ScoreArgs, common: &Common) -> Result<Value> {
    let model = QualityModel::load(&args.model)?;
    let scorer = Scorer::from_config(&common.config)?;
    let pool = common.pool()?;
    let mut out = Output::create(&args.out)?;
    let mut warnings = Vec::new();
    let n = score_stream(&args.corpus, &scorer, &pool, |_, s| {
        if s.flagged {
            warnings.push(json!({ "id": s.id, "diagnostics": s.diagnostics }));
        }
        let probability = model.predict(&s.features)?;
        out.line(&ScoredPair {
            id: s.id,
            components: s.features,
            probability,
        })
    })?;
    out.finish()?;
    Ok(json!({
        "command": "score",
        "pairs": n,
        "flagged": warnings.len(),
        "warning_count": warnings.len(),
        "warnings": warnings,
        "out": args.out,
        "echo": common.echo(),
    }))
}

#[derive(Debug, Clone, Default)]
pub struct FilterArgs {
    pub scores: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: PathBuf,
    /// Overrides the configured filter threshold.
    pub threshold: Option<f64>,
}

/// Keeps pairs whose probability is at least the threshold, in input order.
///
/// With only `scores`, filtered score lines are written. With a corpus the
/// corpus records are written, using probabilities from `scores` or, if
/// absent, from scoring the corpus with `model`.
pub fn cmd_filter(args: &FilterArgs, common: &Common) -> Result<Value> {
    let threshold = args.threshold.unwrap_or(common.config.filter_threshold);
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Config(format!(
            "threshold {threshold} must lie in (0, 1)"
        )));
    }
    let (mut retained, mut removed) = (0usize, 0usize);
    let mut keep = |p: f64| {
        let k = p >= threshold;
        if k {
            retained += 1;
        } else {
            removed += 1;
        }
        k
    };
    match (&args.scores, &args.corpus, &args.model) {
        (Some(scores), None, _) => {
            let file = File::open(scores).map_err(|e| Error::io(scores, e))?;
            let mut out = Output::create(&args.out)?;
            for item in JsonLines::<_, ScoredPair>::new(BufReader::new(file)) {
                let (_, s) = item?;
                if keep(s.probability) {
                    out.line(&s)?;
                }
            }
            out.finish()?;
        }
        (Some(scores), Some(corpus), _) => {
            let probs: HashMap<String, f64> = crate::corpus::load_scores(scores)?
                .into_iter()
                .map(|s| (s.id, s.probability))
                .collect();
            let mut out = Output::create(&args.out)?;
            for pair in CorpusReader::open(corpus)? {
                let pair = pair?;
                let p = *probs
                    .get(&pair.id)
                    .ok_or_else(|| Error::invalid(format!("no score for pair {:?}", pair.id)))?;
                if keep(p) {
                    out.line(&pair)?;
                }
            }
            out.finish()?;
        }
        (None, Some(corpus), Some(model_path)) => {
            let model = QualityModel::load(model_path)?;
            let scorer = Scorer::from_config(&common.config)?;
            let pool = common.pool()?;
            let mut out = Output::create(&args.out)?;
            score_stream(corpus, &scorer, &pool, |pair, s| {
                if keep(model.predict(&s.features)?) {
                    out.line(&pair)?;
                }
                Ok(())
            })?;
            out.finish()?;
        }
        _ => {
            return Err(Error::Config(
                "filter needs --scores, or --corpus together with --model".into(),
            ))
        }
    }
    Ok(json!({
        "command": "filter",
        "threshold": threshold,
        "retained": retained,
        "removed": removed,
        "out": args.out,
        "echo": common.echo(),
    }))
}

struct Labeled {
    features: Vec<FeatureVector>,
    labels: Vec<bool>,
    probabilities: Option<Vec<f64>>,
    flagged: usize,
}

/// Features and labels for a labeled corpus, taken from a scores file when
/// given and computed otherwise.
fn labeled(corpus: &Path, scores: Option<&Path>, common: &Common) -> Result<Labeled> {
    let pairs = crate::corpus::load_corpus(corpus)?;
    let labels = pairs
        .iter()
        .map(|p| {
            p.label
                .ok_or_else(|| Error::invalid(format!("pair {:?} has no label", p.id)))
        })
        .collect::<Result<Vec<bool>>>()?;
    if let Some(path) = scores {
        let by_id: HashMap<String, ScoredPair> = crate::corpus::load_scores(path)?
            .into_iter()
            .map(|s| (s.id.clone(), s))
            .collect();
        let mut features = Vec::with_capacity(pairs.len());
        let mut probabilities = Vec::with_capacity(pairs.len());
        for p in &pairs {
            let s = by_id
                .get(&p.id)
                .ok_or_else(|| Error::invalid(format!("no score for pair {:?}", p.id)))?;
            features.push(s.components);
            probabilities.push(s.probability);
        }
        return Ok(Labeled {
            features,
            labels,
            probabilities: Some(probabilities),
            flagged: 0,
        });
    }
    let scorer = Scorer::from_config(&common.config)?;
    let pool = common.pool()?;
    let mut features = Vec::with_capacity(pairs.len());
    let mut flagged = 0;
    for chunk in pairs.chunks(CHUNK) {
        for s in pool.install(|| scorer.score_batch(chunk))? {
            flagged += usize::from(s.flagged);
            features.push(s.features);
        }
    }
    Ok(Labeled {
        features,
        labels,
        probabilities: None,
        flagged,
    })
}

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub corpus: PathBuf,
    pub scores: Option<PathBuf>,
    pub out: PathBuf,
    pub kind: ModelKind,
    pub c: Option<f64>,
    pub gamma: Option<f64>,
}

fn train_params(
    kind: ModelKind,
    c: Option<f64>,
    gamma: Option<f64>,
    seed: u64,
) -> Result<TrainParams> {
    let mut p = TrainParams::with_kind(kind);
    p.seed = seed;
    if let Some(c) = c {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Config(format!("C = {c} must be positive")));
        }
        p.c = c;
    }
    if let Some(g) = gamma {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Config(format!("gamma = {g} must be positive")));
        }
        p.gamma = Some(g);
    }
    Ok(p)
}

pub fn cmd_train(args: &TrainArgs, common: &Common) -> Result<Value> {
    let params = train_params(args.kind, args.c, args.gamma, common.seed)?;
    let data = labeled(&args.corpus, args.scores.as_deref(), common)?;
    let model = train(&data.features, &data.labels, &params)?;
    model.save(&args.out)?;
    let probs = data
        .features
        .iter()
        .map(|x| model.predict(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "command": "train",
        "kind": args.kind,
        "n_train": data.labels.len(),
        "n_good": data.labels.iter().filter(|&&y| y).count(),
        "flagged": data.flagged,
        "iterations": model.meta.iterations,
        "training_f1": f1(&data.labels, &probs, 0.5)?,
        "training_cross_entropy": cross_entropy(&data.labels, &probs, common.config.ce_clip_epsilon)?,
        "out": args.out,
        "echo": common.echo(),
    }))
}

#[derive(Debug, Clone)]
pub struct EvalArgs {
    pub corpus: PathBuf,
    pub scores: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub threshold: f64,
}

/// Cross-entropy, F1 and per-component Mann-Whitney tests on a labeled corpus.
/// Probabilities come from `model` when given, else from the scores file.
pub fn cmd_eval(args: &EvalArgs, common: &Common) -> Result<Value> {
    let model = args.model.as_deref().map(QualityModel::load).transpose()?;
    if model.is_none() && args.scores.is_none() {
        return Err(Error::Config("eval needs --model or --scores".into()));
    }
    let data = labeled(&args.corpus, args.scores.as_deref(), common)?;
    let probs = match (&model, data.probabilities) {
        (Some(m), _) => data
            .features
            .iter()
            .map(|x| m.predict(x))
            .collect::<Result<Vec<_>>>()?,
        (None, Some(p)) => p,
        (None, None) => unreachable!("scores were required above"),
    };
    let report = json!({
        "command": "eval",
        "n": data.labels.len(),
        "n_good": data.labels.iter().filter(|&&y| y).count(),
        "flagged": data.flagged,
        "threshold": args.threshold,
        "cross_entropy": cross_entropy(&data.labels, &probs, common.config.ce_clip_epsilon)?,
        "f1": f1(&data.labels, &probs, args.threshold)?,
        "confusion": confusion(&data.labels, &probs, args.threshold)?,
        "component_tests": component_tests(&data.features, &data.labels)?,
        "echo": common.echo(),
    });
    write_report(args.out.as_deref(), &report)?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct AblateArgs {
    pub corpus: PathBuf,
    pub scores: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub kind: ModelKind,
    pub c: Option<f64>,
    pub gamma: Option<f64>,
}

pub fn cmd_ablate(args: &AblateArgs, common: &Common) -> Result<Value> {
    let params = train_params(args.kind, args.c, args.gamma, common.seed)?;
    let data = labeled(&args.corpus, args.scores.as_deref(), common)?;
    let split = stratified_split(&data.labels, DEFAULT_TRAIN_FRACTION, common.seed)?;
    let pool = common.pool()?;
    let table = pool.install(|| run_ablation(&data.features, &data.labels, &split, &params))?;
    let report = json!({
        "command": "ablate",
        "train_fraction": DEFAULT_TRAIN_FRACTION,
        "flagged": data.flagged,
        "best": table.best().map(|r| r.subset.clone()),
        "table": table,
        "echo": common.echo(),
    });
    write_report(args.out.as_deref(), &report)?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct MineArgs {
    pub corpus: PathBuf,
    pub out: PathBuf,
    pub k: usize,
    pub min_similarity: f64,
}

pub fn cmd_mine_negatives(args: &MineArgs, common: &Common) -> Result<Value> {
    if args.k == 0 {
        return Err(Error::Config("--k must be at least 1".into()));
    }
    if !args.min_similarity.is_finite() {
        return Err(Error::Config("--min-similarity must be finite".into()));
    }
    common.config.validate()?;
    let provider = build_text_embedder(&common.config.relevance_spec()?)?;
    let pairs = crate::corpus::load_corpus(&args.corpus)?;
    let pool = common.pool()?;
    let records = pool
        .install(|| mine_hard_negatives(&pairs, provider.as_ref(), args.k, args.min_similarity))?;
    let mut out = Output::create(&args.out)?;
    for r in &records {
        out.line(r)?;
    }
    out.finish()?;
    let anchors = {
        let mut ids: Vec<&str> = records.iter().map(|r| r.anchor_id.as_str()).collect();
        ids.dedup();
        ids.len()
    };
    Ok(json!({
        "command": "mine-negatives",
        "pairs": pairs.len(),
        "triplets": records.len(),
        "anchors_with_negatives": anchors,
        "k": args.k,
        "min_similarity": args.min_similarity,
        "out": args.out,
        "echo": common.echo(),
    }))
}

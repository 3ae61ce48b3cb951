use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cidre::classifier::ModelKind;
use cidre::commands::{self, Common};
use cidre::config::RunConfig;
use cidre::relevance::{DEFAULT_MINING_K, DEFAULT_MIN_SIMILARITY};
use cidre::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cidre",
    version,
    about = "Score, classify and filter code comments"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON file with run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// uniform | file:PATH | sidecar:URL
    #[arg(long, global = true)]
    weight_provider: Option<String>,
    /// none | file:PATH (word vectors)
    #[arg(long, global = true)]
    embed_provider: Option<String>,
    /// hash[:DIM] | file:PATH | sidecar:URL
    #[arg(long, global = true)]
    relevance_provider: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute components and probabilities for every pair.
    Score {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep pairs whose probability is at least the threshold.
    Filter {
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Fit a classifier on a labeled corpus.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// Precomputed components to use instead of scoring the corpus.
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "svm_rbf")]
        kind: ModelKind,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Cross-entropy, F1 and component tests on a labeled corpus.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
    /// F1 for every non-empty feature subset.
    Ablate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "svm_rbf")]
        kind: ModelKind,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Hard negatives for contrastive training of the relevance encoder.
    MineNegatives {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MINING_K)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_MIN_SIMILARITY, allow_negative_numbers = true)]
        min_similarity: f64,
    },
}

fn common(g: &Global) -> Result<Common> {
    let mut config = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &g.weight_provider {
        config.weight_provider = s.clone();
    }
    if let Some(s) = &g.embed_provider {
        config.embed_provider = s.clone();
    }
    if let Some(s) = &g.relevance_provider {
        config.relevance_provider = s.clone();
    }
    config.validate()?;
    Ok(Common {
        config,
        seed: g.seed,
        jobs: g.jobs,
    })
}

fn dispatch(cli: &Cli) -> Result<serde_json::Value> {
    let common = common(&cli.global)?;
    match &cli.command {
        Command::Score { corpus, model, out } => commands::cmd_score(
            &commands::ScoreArgs {
                corpus: corpus.clone(),
                model: model.clone(),
                out: out.clone(),
            },
            &common,
        ),
        Command::Filter {
            scores,
            corpus,
            model,
            out,
            threshold,
        } => commands::cmd_filter(
            &commands::FilterArgs {
                scores: scores.clone(),
                corpus: corpus.clone(),
                model: model.clone(),
                out: out.clone(),
                threshold: *threshold,
            },
            &common,
        ),
        Command::Train {
            corpus,
            scores,
            out,
            kind,
            c,
            gamma,
        } => commands::cmd_train(
            &commands::TrainArgs {
                corpus: corpus.clone(),
                scores: scores.clone(),
                out: out.clone(),
                kind: *kind,
                c: *c,
                gamma: *gamma,
            },
            &common,
        ),
        Command::Eval {
            corpus,
            scores,
            model,
            out,
            threshold,
        } => {
            if !(*threshold > 0.0 && *threshold < 1.0) {
                return Err(Error::Config(format!(
                    "threshold {threshold} must lie in (0, 1)"
                )));
            }
            commands::cmd_eval(
                &commands::EvalArgs {
                    corpus: corpus.clone(),
                    scores: scores.clone(),
                    model: model.clone(),
                    out: out.clone(),
                    threshold: *threshold,
                },
                &common,
            )
        }
        Command::Ablate {
            corpus,
            scores,
            out,
            kind,
            c,
            gamma,
        } => commands::cmd_ablate(
            &commands::AblateArgs {
                corpus: corpus.clone(),
                scores: scores.clone(),
                out: out.clone(),
                kind: *kind,
                c: *c,
                gamma: *gamma,
            },
            &common,
        ),
        Command::MineNegatives {
            corpus,
            out,
            k,
            min_similarity,
        } => commands::cmd_mine_negatives(
            &commands::MineArgs {
                corpus: corpus.clone(),
                out: out.clone(),
                k: *k,
                min_similarity: *min_similarity,
            },
            &common,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::run(|| dispatch(&cli));
    if outcome.exit_code == 0 {
        let text = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
        // A closed pipe on stdout is not a failure of the command.
        let _ = writeln!(std::io::stdout(), "{text}");
    } else {
        eprintln!(
            "error: {}",
            outcome.summary["error"].as_str().unwrap_or("unknown")
        );
    }
    ExitCode::from(outcome.exit_code as u8)
}

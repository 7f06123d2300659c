use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xcoref::analyze::{analysis_json, analyze_corpus, pairs_tsv};
use xcoref::config::RunConfig;
use xcoref::evaluate::{format_table, predict_documents, score, scores_json};
use xcoref::io::{load_corpus, load_parallel, write_corpus, write_parallel};
use xcoref::train::{load_run_checkpoint, train, train_xl};
use xcoref::{HarnessError, Result};
use xcoref_core::corpus::{generate_toy_corpus, pseudo_translate, Document, TranslationMode};

#[derive(Parser)]
#[command(name = "xcoref", version, about = "Span-ranking coreference with cross-lingual auxiliary training")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value` overrides applied on top of the config file.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn resolve(&self, fallback: Option<&Path>) -> Result<RunConfig> {
        let base = match self.config.as_deref().or(fallback) {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        base.with_overrides(&self.overrides)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train the monolingual model.
    Train(ConfigArgs),
    /// Joint training with the cross-lingual loss on parallel data.
    TrainXl(ConfigArgs),
    /// Score a checkpoint on an annotated corpus.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Defaults to `test_path`, then `dev_path`.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Metrics sidecar; defaults to `<checkpoint>.metrics.json`.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Write predicted clusters as a corpus file.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Pair every document with a pseudo-translation.
    Translate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// identity or xenoglot.
        #[arg(long, default_value = "xenoglot")]
        mode: TranslationMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Copy source clusters to the target side (identity mode only).
        #[arg(long)]
        analysis: bool,
    },
    /// Categorize predicted cross-lingual pairs on identity-translated data.
    AnalyzePairs {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Parallel corpus with identity translations.
        #[arg(long)]
        corpus: PathBuf,
        /// Also write every pair with its category as TSV.
        #[arg(long)]
        tsv: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Generate a synthetic annotated corpus.
    GenCorpus {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| HarnessError::Io { path: path.into(), source })
}

fn checkpoint_config(checkpoint: &Path, cfg: &ConfigArgs) -> Result<RunConfig> {
    let beside = checkpoint.parent().unwrap_or(Path::new(".")).join("config.toml");
    cfg.resolve(beside.exists().then_some(beside.as_path()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(cfg) => {
            let run = cfg.resolve(None)?;
            let out = train(&run)?;
            let best = &out.log[out.best_epoch];
            println!("best epoch {} dev avg F1 {:.2}; outputs in {}", best.epoch, 100.0 * best.dev_avg_f1, run.output_dir.display());
        }
        Command::TrainXl(cfg) => {
            let run = cfg.resolve(None)?;
            let out = train_xl(&run)?;
            let best = &out.log[out.best_epoch];
            println!("best epoch {} dev avg F1 {:.2}; outputs in {}", best.epoch, 100.0 * best.dev_avg_f1, run.output_dir.display());
        }
        Command::Evaluate { checkpoint, corpus, json, cfg } => {
            let run = checkpoint_config(&checkpoint, &cfg)?;
            let path = corpus
                .or(run.test_path.clone())
                .or(run.dev_path.clone())
                .ok_or_else(|| HarnessError::Config("no corpus given and no test_path or dev_path configured".into()))?;
            let docs = load_corpus(&path)?;
            let (store, vocab, _) = load_run_checkpoint(&checkpoint)?;
            let scores = score(&docs, &predict_documents(&run.model()?, &store, &vocab, &docs)?);
            println!("{}", format_table(&scores));
            let sidecar = json.unwrap_or_else(|| checkpoint.with_extension("metrics.json"));
            write(&sidecar, &serde_json::to_string_pretty(&scores_json(&scores)).expect("json"))?;
        }
        Command::Predict { checkpoint, corpus, out, cfg } => {
            let run = checkpoint_config(&checkpoint, &cfg)?;
            let docs = load_corpus(&corpus)?;
            let (store, vocab, _) = load_run_checkpoint(&checkpoint)?;
            let preds = predict_documents(&run.model()?, &store, &vocab, &docs)?;
            let predicted: Vec<Document> = docs
                .iter()
                .zip(preds)
                .map(|(d, p)| Document::new(d.doc_key.clone(), d.sentences.clone(), p.clusters))
                .collect::<std::result::Result<_, _>>()?;
            write_corpus(&out, &predicted)?;
        }
        Command::Translate { input, out, mode, seed, analysis } => {
            let docs = load_corpus(&input)?;
            let parallel = docs
                .iter()
                .map(|d| {
                    let p = pseudo_translate(d, mode, seed);
                    if analysis {
                        p.with_analysis_clusters()
                    } else {
                        Ok(p)
                    }
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            write_parallel(&out, &parallel)?;
        }
        Command::AnalyzePairs { checkpoint, corpus, tsv, cfg } => {
            let run = checkpoint_config(&checkpoint, &cfg)?;
            let docs = load_parallel(&corpus)?;
            let (store, vocab, target_vocab) = load_run_checkpoint(&checkpoint)?;
            let (counts, rows) = analyze_corpus(&run.model()?, &store, &vocab, target_vocab.as_ref(), &docs)?;
            println!("{}", analysis_json(&counts));
            if let Some(p) = tsv {
                write(&p, &pairs_tsv(&rows))?;
            }
        }
        Command::GenCorpus { n, seed, out } => {
            if n == 0 {
                return Err(HarnessError::Config("--n must be at least 1".into()));
            }
            write_corpus(&out, &generate_toy_corpus(n, seed))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! `cognid`: cognate identification experiments from the command line.
//!
//! Every subcommand resolves its configuration from defaults, then an
//! optional TOML file, then flags; prints a human-readable report to stdout;
//! and writes the machine report (`report.tsv`), a provenance manifest
//! (`manifest.json`), and its artifacts into the output directory.
//!
//! Exit codes: 0 success, 2 data error, 3 configuration or usage error.

mod config;
mod error;
mod featurize;
mod manifest;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Overrides};
use error::CliError;
use pipeline::RunContext;
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "cognid", version, about = "Cognate identification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Configuration shared by every subcommand: a TOML file plus flag
/// overrides, and the output directory.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Word list TSV (concept_id, gloss, language, form, ccn).
    #[arg(long)]
    wordlist: Option<PathBuf>,
    /// Language-to-subfamily TSV.
    #[arg(long)]
    subfamilies: Option<PathBuf>,
    /// Reference tree in Newick format.
    #[arg(long)]
    gold_tree: Option<PathBuf>,
    /// EDIT, HK, SUBSEQ, or HK+SUBSEQ.
    #[arg(long)]
    feature_mode: Option<String>,
    /// Maximum subsequence length, in [1, 7].
    #[arg(long)]
    p: Option<usize>,
    /// Gap penalty, in [0, 1].
    #[arg(long)]
    lambda: Option<f64>,
    /// Classifier loss trade-off, positive.
    #[arg(long)]
    c: Option<f64>,
    /// Seed for every randomized step.
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-validation fold count, at least 2.
    #[arg(long)]
    folds: Option<usize>,
    /// BINARY or WEIGHTED tree distances.
    #[arg(long)]
    distance_mode: Option<String>,
    /// Keep raw named-feature values in the combined feature mode.
    #[arg(long)]
    no_scale_hk: bool,
    /// Output directory for artifacts, the machine report, and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let overrides = Overrides {
            wordlist: self.wordlist.clone(),
            subfamilies: self.subfamilies.clone(),
            gold_tree: self.gold_tree.clone(),
            feature_mode: self.feature_mode.clone(),
            p: self.p,
            lambda: self.lambda,
            c: self.c,
            seed: self.seed,
            folds: self.folds,
            distance_mode: self.distance_mode.clone(),
            no_scale_hk: self.no_scale_hk,
        };
        ExperimentConfig::resolve(self.config.as_deref(), &overrides)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split languages per merged subfamily and write train/test pair files.
    Split {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Turn a labeled pair file into a sparse feature dump.
    Featurize {
        /// Labeled pair TSV, as written by `split`.
        pairs: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Train the linear classifier on a feature dump.
    Train {
        /// Feature dump, as written by `featurize`.
        features: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score a feature dump with a stored model.
    Predict {
        /// Model JSON, as written by `train`.
        model: PathBuf,
        /// Feature dump for the pairs being scored.
        features: PathBuf,
        /// The pair file the dump was made from.
        pairs: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Accuracy, Matthews correlation, and average precision of predictions.
    Evaluate {
        /// Predictions TSV, as written by `predict`.
        predictions: PathBuf,
        /// Second predictions file over the same pairs; adds a paired t-test.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Infer a neighbor-joining tree from predictions and score it.
    Tree {
        /// Predictions TSV, as written by `predict`.
        predictions: PathBuf,
        /// Build the matrix from gold labels instead of model output.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Quartet distances between two Newick trees.
    Treedist {
        /// First tree (the inferred one for the generalized distance).
        first: PathBuf,
        /// Second tree (the reference for the generalized distance).
        second: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// K-fold cross-validation over all same-concept pairs.
    Crossval {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Correlate error-class probabilities with normalized edit distance.
    ErrorAnalysis {
        /// Predictions TSV, as written by `predict`.
        predictions: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

impl Command {
    fn config_args(&self) -> &ConfigArgs {
        match self {
            Command::Split { config }
            | Command::Featurize { config, .. }
            | Command::Train { config, .. }
            | Command::Predict { config, .. }
            | Command::Evaluate { config, .. }
            | Command::Tree { config, .. }
            | Command::Treedist { config, .. }
            | Command::Crossval { config }
            | Command::ErrorAnalysis { config, .. } => config,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Split { .. } => "split",
            Command::Featurize { .. } => "featurize",
            Command::Train { .. } => "train",
            Command::Predict { .. } => "predict",
            Command::Evaluate { .. } => "evaluate",
            Command::Tree { .. } => "tree",
            Command::Treedist { .. } => "treedist",
            Command::Crossval { .. } => "crossval",
            Command::ErrorAnalysis { .. } => "error-analysis",
        }
    }
}

fn run(command: &Command) -> Result<Report, CliError> {
    let args = command.config_args();
    let cfg = args.resolve()?;
    let mut ctx = RunContext::new(command.name(), &cfg, args.out.clone());
    let report = match command {
        Command::Split { .. } => pipeline::run_split(&cfg, &mut ctx)?,
        Command::Featurize { pairs, .. } => pipeline::run_featurize(&cfg, &mut ctx, pairs)?,
        Command::Train { features, .. } => pipeline::run_train(&cfg, &mut ctx, features)?,
        Command::Predict {
            model,
            features,
            pairs,
            ..
        } => pipeline::run_predict(&mut ctx, model, features, pairs)?,
        Command::Evaluate {
            predictions,
            compare,
            ..
        } => pipeline::run_evaluate(&mut ctx, predictions, compare.as_deref())?,
        Command::Tree {
            predictions,
            oracle,
            ..
        } => pipeline::run_tree(&cfg, &mut ctx, predictions, *oracle)?,
        Command::Treedist { first, second, .. } => {
            pipeline::run_treedist(&mut ctx, first, second)?
        }
        Command::Crossval { .. } => pipeline::run_crossval(&cfg, &mut ctx)?,
        Command::ErrorAnalysis { predictions, .. } => {
            pipeline::run_error_analysis(&mut ctx, predictions)?
        }
    };
    ctx.finish(&report)?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // Help and version requests are successes; everything else is a
            // usage problem and shares the configuration exit code.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok(report) => {
            print!("{}", report.render_human());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

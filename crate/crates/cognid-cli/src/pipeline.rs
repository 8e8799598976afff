//! Subcommand implementations. Every handler is a pure function of the
//! configuration and its input files: it writes fixed-name artifacts into
//! the output directory and returns a report whose machine rendering is
//! byte-identical across re-runs.

use std::fs;
use std::path::{Path, PathBuf};

use cognid::classifier::{train, LinearModel};
use cognid::eval::{accuracy, average_precision, mcc, paired_ttest, pearson_r, ConfusionCounts};
use cognid::features::SparseVector;
use cognid::phylo::{
    binary_distance_matrix, gqd, neighbor_joining, parse_newick, quartet_distance, quartet_tally,
    weighted_distance_matrix,
};
use cognid::strsim::ldn;
use cognid::wordlist::{
    dedupe_synonyms, generate_pairs, kfold_split, parse_pairs, parse_subfamilies, parse_wordlist,
    render_pairs, subfamily_split, LabeledPair, WordList,
};
use cognid::{NeumaierSum, PhyloTree};

use crate::config::{DistanceMode, ExperimentConfig, FeatureMode};
use crate::error::{io_data, CliError};
use crate::featurize::{featurize_pairs, HkScaling};
use crate::manifest::Manifest;
use crate::report::Report;

/// Where a subcommand reads its tracked inputs and writes its artifacts.
pub struct RunContext {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
}

impl RunContext {
    pub fn new(command: &str, cfg: &ExperimentConfig, out_dir: PathBuf) -> Self {
        RunContext {
            out_dir,
            manifest: Manifest::new(command, cfg),
        }
    }

    /// Reads an input file and records its digest in the manifest.
    fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_data(path, e))?;
        self.manifest.add_input(path)?;
        Ok(text)
    }

    fn write_artifact(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.out_dir).map_err(|e| io_data(&self.out_dir, e))?;
        let path = self.out_dir.join(name);
        fs::write(&path, contents).map_err(|e| io_data(&path, e))?;
        Ok(path)
    }

    /// Writes the machine report and manifest. Called once per run.
    pub fn finish(&self, report: &Report) -> Result<(), CliError> {
        self.write_artifact("report.tsv", &report.render_machine())?;
        fs::create_dir_all(&self.out_dir).map_err(|e| io_data(&self.out_dir, e))?;
        self.manifest.write(&self.out_dir)
    }
}

fn load_wordlist(cfg: &ExperimentConfig, ctx: &mut RunContext) -> Result<WordList, CliError> {
    let path = cfg.require_wordlist()?.to_path_buf();
    let text = ctx.read_input(&path)?;
    let mut wl = parse_wordlist(&text)?;
    if let Some(subfamily_path) = &cfg.subfamily_path {
        let text = ctx.read_input(subfamily_path)?;
        wl.set_subfamilies(parse_subfamilies(&text)?);
    }
    Ok(wl)
}

fn load_pairs(ctx: &mut RunContext, path: &Path) -> Result<Vec<LabeledPair>, CliError> {
    let text = ctx.read_input(path)?;
    Ok(parse_pairs(&text)?)
}

fn load_rows(ctx: &mut RunContext, path: &Path) -> Result<Vec<(SparseVector, bool)>, CliError> {
    let text = ctx.read_input(path)?;
    text.lines()
        .filter(|line| !line.is_empty())
        .map(|line| {
            let (label, fv) = SparseVector::parse_line(line)?;
            Ok((fv, label))
        })
        .collect()
}

fn load_tree(ctx: &mut RunContext, path: &Path) -> Result<PhyloTree, CliError> {
    let text = ctx.read_input(path)?;
    Ok(parse_newick(&text)?)
}

fn join_sorted<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
    items.into_iter().collect::<Vec<_>>().join(",")
}

/// Splits the languages of each merged subfamily in half and writes the
/// train- and test-side pair files.
pub fn run_split(cfg: &ExperimentConfig, ctx: &mut RunContext) -> Result<Report, CliError> {
    cfg.require_subfamilies()?;
    let wl = load_wordlist(cfg, ctx)?;
    let deduped = dedupe_synonyms(&wl, cfg.seed);
    let (train_languages, test_languages) = subfamily_split(&deduped, cfg.seed)?;
    let train_pairs = generate_pairs(&deduped.filtered(&train_languages));
    let test_pairs = generate_pairs(&deduped.filtered(&test_languages));
    ctx.write_artifact("train_pairs.tsv", &render_pairs(&train_pairs))?;
    ctx.write_artifact("test_pairs.tsv", &render_pairs(&test_pairs))?;

    let mut report = Report::new("split");
    report.push_count("n_languages", deduped.languages().len());
    for (name, members) in deduped.merged_subfamily_groups() {
        report.push_count(format!("group_{name}"), members.len());
    }
    report.push(
        "train_languages",
        join_sorted(train_languages.iter().map(String::as_str)),
    );
    report.push(
        "test_languages",
        join_sorted(test_languages.iter().map(String::as_str)),
    );
    report.push_count("n_train_pairs", train_pairs.len());
    report.push_count("n_test_pairs", test_pairs.len());
    Ok(report)
}

/// Featurizes a labeled pair file into the sparse dump format.
pub fn run_featurize(
    cfg: &ExperimentConfig,
    ctx: &mut RunContext,
    pairs_path: &Path,
) -> Result<Report, CliError> {
    let pairs = load_pairs(ctx, pairs_path)?;
    let rows = featurize_pairs(cfg, &pairs)?;
    let mut dump = String::new();
    for (fv, label) in &rows {
        dump.push_str(&fv.render_line(*label));
        dump.push('\n');
    }
    ctx.write_artifact("features.dump", &dump)?;

    let mut keys = std::collections::BTreeSet::new();
    for (fv, _) in &rows {
        for (key, _) in fv.iter() {
            keys.insert(key.clone());
        }
    }
    let mut report = Report::new("featurize");
    report.push("feature_mode", cfg.feature_mode.as_str());
    report.push_count("n_pairs", rows.len());
    report.push_count("n_positive", rows.iter().filter(|(_, l)| *l).count());
    report.push_count("n_features", keys.len());
    Ok(report)
}

/// Trains the linear classifier on a feature dump and writes the model.
/// When the combined feature mode standardizes the named features, the
/// standardization is folded back into the stored weights so the model
/// consumes raw dumps.
pub fn run_train(
    cfg: &ExperimentConfig,
    ctx: &mut RunContext,
    features_path: &Path,
) -> Result<Report, CliError> {
    let rows = load_rows(ctx, features_path)?;
    let model = train_rows(cfg, &rows)?;
    ctx.write_artifact("model.json", &model.to_json_string())?;

    let mut report = Report::new("train");
    report.push("feature_mode", cfg.feature_mode.as_str());
    report.push_count("n_examples", rows.len());
    report.push_count("n_features", model.weight_entries().len());
    report.push_count("iterations", model.meta().iterations);
    report.push_float("final_objective", model.meta().final_objective);
    report.push_float("bias", model.bias());
    Ok(report)
}

/// The shared training path: standardize the named features when configured,
/// train, then fold the standardization into the weights.
pub fn train_rows(
    cfg: &ExperimentConfig,
    rows: &[(SparseVector, bool)],
) -> Result<LinearModel, CliError> {
    if cfg.feature_mode == FeatureMode::HkPlusSubseq && cfg.scale_hk {
        let scaling = HkScaling::fit(rows);
        let model = train(&scaling.apply(rows), cfg.c, cfg.seed)?;
        scaling.fold_into_model(model)
    } else {
        Ok(train(rows, cfg.c, cfg.seed)?)
    }
}

/// One scored word pair, as written to `predictions.tsv`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub pair: LabeledPair,
    pub score: f64,
    pub probability: f64,
    pub predicted: bool,
}

pub const PREDICTIONS_HEADER: &str =
    "concept_id\tlang_a\tlang_b\tform_a\tform_b\tgold\tscore\tprobability\tpredicted";

pub fn render_predictions(rows: &[PredictionRow]) -> String {
    let mut out = String::from(PREDICTIONS_HEADER);
    out.push('\n');
    for row in rows {
        let p = &row.pair;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            p.concept_id,
            p.lang_a,
            p.lang_b,
            p.form_a,
            p.form_b,
            u8::from(p.label),
            row.score,
            row.probability,
            u8::from(row.predicted),
        ));
    }
    out
}

pub fn parse_predictions(text: &str) -> Result<Vec<PredictionRow>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == PREDICTIONS_HEADER => {}
        _ => return Err(CliError::data("predictions file is missing its header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 9 {
            return Err(CliError::data(format!(
                "predictions line {}: expected 9 fields, found {}",
                i + 2,
                fields.len()
            )));
        }
        let bad = |what: &str| {
            CliError::data(format!("predictions line {}: bad {what}", i + 2))
        };
        let flag = |s: &str, what: &str| match s {
            "1" => Ok(true),
            "0" => Ok(false),
            _ => Err(bad(what)),
        };
        rows.push(PredictionRow {
            pair: LabeledPair {
                concept_id: fields[0].parse().map_err(|_| bad("concept_id"))?,
                lang_a: fields[1].to_string(),
                lang_b: fields[2].to_string(),
                form_a: fields[3].to_string(),
                form_b: fields[4].to_string(),
                label: flag(fields[5], "gold")?,
            },
            score: fields[6].parse().map_err(|_| bad("score"))?,
            probability: fields[7].parse().map_err(|_| bad("probability"))?,
            predicted: flag(fields[8], "predicted")?,
        });
    }
    Ok(rows)
}

/// Scores a feature dump with a stored model and joins the scores back onto
/// the pair file the dump was made from, row by row.
pub fn run_predict(
    ctx: &mut RunContext,
    model_path: &Path,
    features_path: &Path,
    pairs_path: &Path,
) -> Result<Report, CliError> {
    let model_text = ctx.read_input(model_path)?;
    let model = LinearModel::from_json_str(&model_text)?;
    let rows = load_rows(ctx, features_path)?;
    let pairs = load_pairs(ctx, pairs_path)?;
    if rows.len() != pairs.len() {
        return Err(CliError::data(format!(
            "feature dump has {} rows but the pair file has {}",
            rows.len(),
            pairs.len()
        )));
    }
    let predictions: Vec<PredictionRow> = pairs
        .into_iter()
        .zip(rows)
        .enumerate()
        .map(|(i, (pair, (fv, label)))| {
            if pair.label != label {
                return Err(CliError::data(format!(
                    "row {}: dump label disagrees with the pair file",
                    i + 1
                )));
            }
            let p = model.predict(&fv);
            Ok(PredictionRow {
                pair,
                score: p.score,
                probability: p.probability,
                predicted: p.label,
            })
        })
        .collect::<Result<_, _>>()?;
    ctx.write_artifact("predictions.tsv", &render_predictions(&predictions))?;

    let mut report = Report::new("predict");
    report.push_count("n_pairs", predictions.len());
    report.push_count(
        "n_predicted_positive",
        predictions.iter().filter(|r| r.predicted).count(),
    );
    Ok(report)
}

/// Accuracy, Matthews correlation, and average precision of a predictions
/// file; optionally a paired t-test against a second predictions file over
/// the same pairs.
pub fn run_evaluate(
    ctx: &mut RunContext,
    predictions_path: &Path,
    compare_path: Option<&Path>,
) -> Result<Report, CliError> {
    let text = ctx.read_input(predictions_path)?;
    let rows = parse_predictions(&text)?;
    let gold: Vec<bool> = rows.iter().map(|r| r.pair.label).collect();
    let predicted: Vec<bool> = rows.iter().map(|r| r.predicted).collect();
    let scores: Vec<f64> = rows.iter().map(|r| r.score).collect();
    let cc = ConfusionCounts::from_predictions(&predicted, &gold)?;

    let mut report = Report::new("evaluate");
    report.push_count("n_pairs", rows.len());
    report.push_count("true_pos", cc.true_pos as usize);
    report.push_count("true_neg", cc.true_neg as usize);
    report.push_count("false_pos", cc.false_pos as usize);
    report.push_count("false_neg", cc.false_neg as usize);
    report.push_float("accuracy", accuracy(cc)?);
    report.push_float("mcc", mcc(cc)?);
    report.push_float("average_precision", average_precision(&scores, &gold)?);

    if let Some(compare_path) = compare_path {
        let text = ctx.read_input(compare_path)?;
        let other = parse_predictions(&text)?;
        if other.len() != rows.len() {
            return Err(CliError::data(format!(
                "comparison file has {} rows, expected {}",
                other.len(),
                rows.len()
            )));
        }
        let mut other_predicted = Vec::with_capacity(other.len());
        for (i, (a, b)) in rows.iter().zip(&other).enumerate() {
            if a.pair != b.pair {
                return Err(CliError::data(format!(
                    "comparison row {}: pair differs from the first file",
                    i + 1
                )));
            }
            other_predicted.push(b.predicted);
        }
        let agree_a: Vec<bool> = predicted
            .iter()
            .zip(&gold)
            .map(|(p, g)| p == g)
            .collect();
        let agree_b: Vec<bool> = other_predicted
            .iter()
            .zip(&gold)
            .map(|(p, g)| p == g)
            .collect();
        let other_cc = ConfusionCounts::from_predictions(&other_predicted, &gold)?;
        report.push_float("compare_accuracy", accuracy(other_cc)?);
        let tt = paired_ttest(&agree_a, &agree_b)?;
        report.push_float("t", tt.t);
        report.push_float("p_value", tt.p_value);
        report.push_count("df", tt.df);
    }
    Ok(report)
}

/// Builds the configured distance matrix from a predictions file, infers the
/// NJ tree, and scores it against the gold tree when one is configured.
pub fn run_tree(
    cfg: &ExperimentConfig,
    ctx: &mut RunContext,
    predictions_path: &Path,
    oracle: bool,
) -> Result<Report, CliError> {
    let text = ctx.read_input(predictions_path)?;
    let rows = parse_predictions(&text)?;
    let matrix = match cfg.distance_mode {
        DistanceMode::Binary => {
            let judgments: Vec<(&str, &str, bool)> = rows
                .iter()
                .map(|r| {
                    let cognate = if oracle { r.pair.label } else { r.predicted };
                    (r.pair.lang_a.as_str(), r.pair.lang_b.as_str(), cognate)
                })
                .collect();
            binary_distance_matrix(&judgments)?
        }
        DistanceMode::Weighted => {
            let judgments: Vec<(&str, &str, f64)> = rows
                .iter()
                .map(|r| {
                    let p = if oracle {
                        f64::from(u8::from(r.pair.label))
                    } else {
                        r.probability
                    };
                    (r.pair.lang_a.as_str(), r.pair.lang_b.as_str(), p)
                })
                .collect();
            weighted_distance_matrix(&judgments)?
        }
    };
    ctx.write_artifact("matrix.phylip", &matrix.to_phylip())?;
    let inferred = neighbor_joining(&matrix)?;
    ctx.write_artifact("inferred.nwk", &cognid::phylo::write_newick(&inferred))?;

    let mut report = Report::new("tree");
    report.push("distance_mode", cfg.distance_mode.as_str());
    report.push("condition", if oracle { "oracle" } else { "model" });
    report.push_count("n_languages", matrix.len());
    if let Some(gold_path) = cfg.gold_tree_path.clone() {
        let gold = load_tree(ctx, &gold_path)?;
        report.push_float("qd", quartet_distance(&inferred, &gold)?);
        report.push_float("gqd", gqd(&inferred, &gold)?);
    }
    Ok(report)
}

/// Quartet comparison of two Newick files. The second tree is the reference
/// for the generalized distance; an unresolved reference reports `n/a`.
pub fn run_treedist(
    ctx: &mut RunContext,
    first_path: &Path,
    second_path: &Path,
) -> Result<Report, CliError> {
    let first = load_tree(ctx, first_path)?;
    let second = load_tree(ctx, second_path)?;
    let tally = quartet_tally(&first, &second)?;

    let mut report = Report::new("treedist");
    report.push_count("n_leaves", first.leaf_count());
    report.push_count("total_quartets", tally.total as usize);
    report.push_count("same", tally.same as usize);
    report.push_count("different", tally.different as usize);
    report.push_count("only_first", tally.only_first as usize);
    report.push_count("only_second", tally.only_second as usize);
    report.push_count("both_star", tally.both_star as usize);
    report.push_count("butterflies_first", tally.butterflies_first() as usize);
    report.push_count("butterflies_second", tally.butterflies_second() as usize);
    report.push_float("quartet_distance", quartet_distance(&first, &second)?);
    report.push_float(
        "disagreement_rate",
        tally.disagreements() as f64 / tally.total as f64,
    );
    match gqd(&first, &second) {
        Ok(value) => report.push_float("gqd", value),
        Err(_) => report.push("gqd", "n/a"),
    }
    Ok(report)
}

/// K-fold cross-validation over all same-concept pairs of the word list.
pub fn run_crossval(cfg: &ExperimentConfig, ctx: &mut RunContext) -> Result<Report, CliError> {
    let wl = load_wordlist(cfg, ctx)?;
    let deduped = dedupe_synonyms(&wl, cfg.seed);
    let pairs = generate_pairs(&deduped);
    let folds = kfold_split(&pairs, cfg.folds, cfg.seed)?;

    let mut report = Report::new("crossval");
    report.push("feature_mode", cfg.feature_mode.as_str());
    report.push_count("n_pairs", pairs.len());
    report.push_count("folds", folds.len());
    let mut mean = NeumaierSum::<f64>::new();
    for held_out in 0..folds.len() {
        let train_pairs: Vec<LabeledPair> = folds
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != held_out)
            .flat_map(|(_, fold)| fold.iter().cloned())
            .collect();
        let fold_rows = featurize_pairs(cfg, &train_pairs)?;
        let test_rows = featurize_pairs(cfg, &folds[held_out])?;
        let model = train_rows(cfg, &fold_rows)?;
        let gold: Vec<bool> = test_rows.iter().map(|(_, label)| *label).collect();
        let predicted: Vec<bool> = test_rows
            .iter()
            .map(|(fv, _)| model.predict(fv).label)
            .collect();
        let acc: f64 = accuracy(ConfusionCounts::from_predictions(&predicted, &gold)?)?;
        report.push_float(format!("acc_fold_{}", held_out + 1), acc);
        mean.add(acc);
    }
    report.push_float("acc_mean", mean.total() / folds.len() as f64);
    Ok(report)
}

/// Splits the errors of a predictions file into false positives and false
/// negatives and correlates the model probability with the
/// length-normalized edit distance within each class.
pub fn run_error_analysis(
    ctx: &mut RunContext,
    predictions_path: &Path,
) -> Result<Report, CliError> {
    let text = ctx.read_input(predictions_path)?;
    let rows = parse_predictions(&text)?;
    let fp: Vec<&PredictionRow> = rows
        .iter()
        .filter(|r| r.predicted && !r.pair.label)
        .collect();
    let fn_: Vec<&PredictionRow> = rows
        .iter()
        .filter(|r| !r.predicted && r.pair.label)
        .collect();

    let mut report = Report::new("error-analysis");
    report.push_count("n_pairs", rows.len());
    for (class, members) in [("fp", &fp), ("fn", &fn_)] {
        report.push_count(format!("{class}_count"), members.len());
        if members.len() < 2 {
            report.push(format!("{class}_r"), "n/a");
            report.push(format!("{class}_mean_probability"), "n/a");
            continue;
        }
        let probabilities: Vec<f64> = members.iter().map(|r| r.probability).collect();
        let mut ldns = Vec::with_capacity(members.len());
        for r in members.iter() {
            ldns.push(ldn(&r.pair.form_a, &r.pair.form_b)?);
        }
        match pearson_r(&probabilities, &ldns) {
            Ok(r) => report.push_float(format!("{class}_r"), r),
            Err(_) => report.push(format!("{class}_r"), "n/a"),
        }
        let mut sum = NeumaierSum::<f64>::new();
        for p in &probabilities {
            sum.add(*p);
        }
        report.push_float(
            format!("{class}_mean_probability"),
            sum.total() / members.len() as f64,
        );
    }
    Ok(report)
}

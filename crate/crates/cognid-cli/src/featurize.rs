//! Turns labeled word pairs into sparse feature vectors according to the
//! configured feature mode, and standardizes the named similarity features
//! when they are concatenated with subsequence features.

use std::collections::BTreeMap;

use cognid::classifier::LinearModel;
use cognid::features::{FeatureKey, SparseVector};
use cognid::strsim::hk_features;
use cognid::subseq::pair_features;
use cognid::wordlist::LabeledPair;
use cognid::{KernelParams, NeumaierSum};

use crate::config::{ExperimentConfig, FeatureMode};
use crate::error::CliError;

/// The named feature of the edit-distance-only baseline.
pub const EDIT_KEY: &str = "edit_distance";

fn hk_vector(a: &str, b: &str) -> Result<SparseVector, CliError> {
    let f = hk_features(a, b)?;
    Ok(SparseVector::from_entries(vec![
        (FeatureKey::named("edit_distance"), f.edit_distance as f64),
        (
            FeatureKey::named("common_prefix_len"),
            f.common_prefix_len as f64,
        ),
        (
            FeatureKey::named("common_bigram_count"),
            f.common_bigram_count as f64,
        ),
        (FeatureKey::named("len_a"), f.len_a as f64),
        (FeatureKey::named("len_b"), f.len_b as f64),
        (FeatureKey::named("abs_len_diff"), f.abs_len_diff as f64),
    ]))
}

fn edit_vector(a: &str, b: &str) -> Result<SparseVector, CliError> {
    let f = hk_features(a, b)?;
    Ok(SparseVector::from_entries(vec![(
        FeatureKey::named(EDIT_KEY),
        f.edit_distance as f64,
    )]))
}

/// The feature vector of one word pair under the configured mode. Raw
/// (unstandardized) values; standardization happens at training time and is
/// folded back into the model weights, so dumped features always mean the
/// same thing.
pub fn pair_vector(
    cfg: &ExperimentConfig,
    params: &KernelParams,
    pair: &LabeledPair,
) -> Result<SparseVector, CliError> {
    let a = pair.form_a.as_str();
    let b = pair.form_b.as_str();
    match cfg.feature_mode {
        FeatureMode::Edit => edit_vector(a, b),
        FeatureMode::Hk => hk_vector(a, b),
        FeatureMode::Subseq => Ok(pair_features(a, b, params)?),
        FeatureMode::HkPlusSubseq => {
            let hk = hk_vector(a, b)?;
            let subseq = pair_features(a, b, params)?;
            Ok(hk.concat(subseq))
        }
    }
}

/// Featurizes every pair, labels carried through.
pub fn featurize_pairs(
    cfg: &ExperimentConfig,
    pairs: &[LabeledPair],
) -> Result<Vec<(SparseVector, bool)>, CliError> {
    let params = cfg.kernel_params()?;
    pairs
        .iter()
        .map(|pair| Ok((pair_vector(cfg, &params, pair)?, pair.label)))
        .collect()
}

/// Per-key mean and population standard deviation of the named features
/// over a training set, with absent entries counted as zero.
pub struct HkScaling {
    stats: Vec<(FeatureKey, f64, f64)>,
}

impl HkScaling {
    pub fn fit(rows: &[(SparseVector, bool)]) -> Self {
        let n = rows.len() as f64;
        let mut sums: BTreeMap<FeatureKey, NeumaierSum<f64>> = BTreeMap::new();
        for (fv, _) in rows {
            for (key, value) in fv.iter() {
                if matches!(key, FeatureKey::Named(_)) {
                    sums.entry(key.clone()).or_default().add(value);
                }
            }
        }
        let means: BTreeMap<FeatureKey, f64> = sums
            .into_iter()
            .map(|(key, sum)| (key, sum.total() / n))
            .collect();
        let mut sq: BTreeMap<FeatureKey, NeumaierSum<f64>> = BTreeMap::new();
        for (fv, _) in rows {
            for (key, mean) in &means {
                let x = fv.get(key).unwrap_or(0.0);
                sq.entry(key.clone()).or_default().add((x - mean) * (x - mean));
            }
        }
        let stats = means
            .into_iter()
            .map(|(key, mean)| {
                let sd = (sq[&key].total() / n).sqrt();
                (key, mean, sd)
            })
            .collect();
        HkScaling { stats }
    }

    /// Standardizes the named features of every vector. Keys with zero
    /// spread carry no information and are dropped.
    pub fn apply(&self, rows: &[(SparseVector, bool)]) -> Vec<(SparseVector, bool)> {
        let lookup: BTreeMap<&FeatureKey, (f64, f64)> = self
            .stats
            .iter()
            .map(|(key, mean, sd)| (key, (*mean, *sd)))
            .collect();
        rows.iter()
            .map(|(fv, label)| {
                let entries: Vec<(FeatureKey, f64)> = fv
                    .iter()
                    .filter_map(|(key, value)| match lookup.get(key) {
                        Some((_, sd)) if *sd == 0.0 => None,
                        Some((mean, sd)) => Some((key.clone(), (value - mean) / sd)),
                        None => Some((key.clone(), value)),
                    })
                    .collect();
                (SparseVector::from_entries(entries), *label)
            })
            .collect()
    }

    /// Rewrites a model trained on standardized features so it consumes raw
    /// features: `w x' = (w / sd) x - (w / sd) mean` per standardized key,
    /// so weights divide by the spread and the bias absorbs the means.
    pub fn fold_into_model(&self, model: LinearModel) -> Result<LinearModel, CliError> {
        let lookup: BTreeMap<&FeatureKey, (f64, f64)> = self
            .stats
            .iter()
            .map(|(key, mean, sd)| (key, (*mean, *sd)))
            .collect();
        let mut bias = model.bias();
        let entries: Vec<(FeatureKey, f64)> = model
            .weight_entries()
            .into_iter()
            .map(|(key, w)| match lookup.get(&key) {
                Some((mean, sd)) => {
                    let scaled = w / sd;
                    bias -= scaled * mean;
                    (key, scaled)
                }
                None => (key, w),
            })
            .collect();
        let rebuilt =
            LinearModel::with_weights(entries, bias, model.c(), model.meta().clone())?;
        Ok(rebuilt)
    }
}

//! Experiment configuration: defaults, an optional TOML file, and flag
//! overrides, merged in that order.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Which features represent a word pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureMode {
    /// Edit distance as the sole feature (the baseline classifier).
    Edit,
    /// The six named word-pair similarity features.
    Hk,
    /// Gap-weighted common-subsequence features.
    Subseq,
    /// Both, concatenated into one sparse vector.
    HkPlusSubseq,
}

impl FeatureMode {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text.to_ascii_uppercase().as_str() {
            "EDIT" => Ok(FeatureMode::Edit),
            "HK" => Ok(FeatureMode::Hk),
            "SUBSEQ" => Ok(FeatureMode::Subseq),
            "HK_PLUS_SUBSEQ" | "HK+SUBSEQ" => Ok(FeatureMode::HkPlusSubseq),
            other => Err(CliError::config(format!(
                "unknown feature mode {other:?}; expected EDIT, HK, SUBSEQ, or HK_PLUS_SUBSEQ"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::Edit => "EDIT",
            FeatureMode::Hk => "HK",
            FeatureMode::Subseq => "SUBSEQ",
            FeatureMode::HkPlusSubseq => "HK_PLUS_SUBSEQ",
        }
    }
}

/// How predicted judgments become distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceMode {
    /// One minus the cognate share of hard labels.
    Binary,
    /// One minus the mean cognacy probability.
    Weighted,
}

impl DistanceMode {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text.to_ascii_uppercase().as_str() {
            "BINARY" => Ok(DistanceMode::Binary),
            "WEIGHTED" => Ok(DistanceMode::Weighted),
            other => Err(CliError::config(format!(
                "unknown distance mode {other:?}; expected BINARY or WEIGHTED"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMode::Binary => "BINARY",
            DistanceMode::Weighted => "WEIGHTED",
        }
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub wordlist_path: Option<PathBuf>,
    pub subfamily_path: Option<PathBuf>,
    pub gold_tree_path: Option<PathBuf>,
    pub feature_mode: FeatureMode,
    pub p: usize,
    pub lambda: f64,
    pub c: f64,
    pub seed: u64,
    pub folds: usize,
    pub distance_mode: DistanceMode,
    /// Standardize the named similarity features with training-set
    /// statistics before concatenating them with subsequence features.
    pub scale_hk: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            wordlist_path: None,
            subfamily_path: None,
            gold_tree_path: None,
            feature_mode: FeatureMode::Subseq,
            p: 3,
            lambda: 0.5,
            c: 1.0,
            seed: 42,
            folds: 5,
            distance_mode: DistanceMode::Binary,
            scale_hk: true,
        }
    }
}

/// The TOML file schema; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    wordlist: Option<PathBuf>,
    subfamilies: Option<PathBuf>,
    gold_tree: Option<PathBuf>,
    feature_mode: Option<String>,
    p: Option<usize>,
    lambda: Option<f64>,
    c: Option<f64>,
    seed: Option<u64>,
    folds: Option<usize>,
    distance_mode: Option<String>,
    scale_hk: Option<bool>,
}

/// Flag-level overrides collected by the argument parser.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub wordlist: Option<PathBuf>,
    pub subfamilies: Option<PathBuf>,
    pub gold_tree: Option<PathBuf>,
    pub feature_mode: Option<String>,
    pub p: Option<usize>,
    pub lambda: Option<f64>,
    pub c: Option<f64>,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub distance_mode: Option<String>,
    pub no_scale_hk: bool,
}

impl ExperimentConfig {
    /// Defaults, then the TOML file if given, then flag overrides.
    pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            let parsed: ConfigFile = toml::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            cfg.apply_file(parsed, path)?;
        }
        cfg.apply_overrides(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, file: ConfigFile, path: &Path) -> Result<(), CliError> {
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        // Relative paths in the file resolve against the file's directory.
        let anchor = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        if let Some(p) = file.wordlist {
            self.wordlist_path = Some(anchor(p));
        }
        if let Some(p) = file.subfamilies {
            self.subfamily_path = Some(anchor(p));
        }
        if let Some(p) = file.gold_tree {
            self.gold_tree_path = Some(anchor(p));
        }
        if let Some(m) = file.feature_mode {
            self.feature_mode = FeatureMode::parse(&m)?;
        }
        if let Some(p) = file.p {
            self.p = p;
        }
        if let Some(l) = file.lambda {
            self.lambda = l;
        }
        if let Some(c) = file.c {
            self.c = c;
        }
        if let Some(s) = file.seed {
            self.seed = s;
        }
        if let Some(f) = file.folds {
            self.folds = f;
        }
        if let Some(d) = file.distance_mode {
            self.distance_mode = DistanceMode::parse(&d)?;
        }
        if let Some(s) = file.scale_hk {
            self.scale_hk = s;
        }
        Ok(())
    }

    fn apply_overrides(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(p) = &o.wordlist {
            self.wordlist_path = Some(p.clone());
        }
        if let Some(p) = &o.subfamilies {
            self.subfamily_path = Some(p.clone());
        }
        if let Some(p) = &o.gold_tree {
            self.gold_tree_path = Some(p.clone());
        }
        if let Some(m) = &o.feature_mode {
            self.feature_mode = FeatureMode::parse(m)?;
        }
        if let Some(p) = o.p {
            self.p = p;
        }
        if let Some(l) = o.lambda {
            self.lambda = l;
        }
        if let Some(c) = o.c {
            self.c = c;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(f) = o.folds {
            self.folds = f;
        }
        if let Some(d) = &o.distance_mode {
            self.distance_mode = DistanceMode::parse(d)?;
        }
        if o.no_scale_hk {
            self.scale_hk = false;
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(1..=cognid::subseq::MAX_SUBSEQ_LEN).contains(&self.p) {
            return Err(CliError::config(format!(
                "p must be in [1, {}], got {}",
                cognid::subseq::MAX_SUBSEQ_LEN,
                self.p
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda <= 1.0) {
            return Err(CliError::config(format!(
                "lambda must be in [0, 1], got {}",
                self.lambda
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(CliError::config(format!(
                "c must be positive and finite, got {}",
                self.c
            )));
        }
        if self.folds < 2 {
            return Err(CliError::config(format!(
                "folds must be at least 2, got {}",
                self.folds
            )));
        }
        Ok(())
    }

    /// The path, or a configuration error naming the missing field.
    pub fn require_wordlist(&self) -> Result<&Path, CliError> {
        self.wordlist_path
            .as_deref()
            .ok_or_else(|| CliError::config("missing word list path (set `wordlist` or --wordlist)"))
    }

    pub fn require_subfamilies(&self) -> Result<&Path, CliError> {
        self.subfamily_path.as_deref().ok_or_else(|| {
            CliError::config("missing subfamily path (set `subfamilies` or --subfamilies)")
        })
    }

    pub fn kernel_params(&self) -> Result<cognid::KernelParams, CliError> {
        cognid::subseq::KernelParams::new(self.lambda, self.p)
            .map_err(|e| CliError::config(e.to_string()))
    }
}

//! Classical string similarity measures over Unicode code points, plus the
//! six-feature word-pair record used as a baseline feature set.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrsimError {
    #[error("length-normalized edit distance is undefined for two empty strings")]
    BothEmpty,
    #[error("word-pair features require non-empty words")]
    EmptyWord,
}

/// Levenshtein distance with unit insertion, deletion and substitution costs.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = if ca == cb { diag } else { diag + 1 };
            diag = row[j + 1];
            row[j + 1] = cost.min(row[j] + 1).min(diag + 1);
        }
    }
    row[b.len()]
}

/// Denominator convention for [`ldn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LdnDenominator {
    /// Divide by the longer word length (the standard LDN).
    #[default]
    Max,
    /// Divide by the average word length (the scaled variant).
    Average,
}

/// Length-normalized edit distance in `[0, 1]` using the max-length
/// denominator.
pub fn ldn<F: Scalar>(a: &str, b: &str) -> Result<F, StrsimError> {
    ldn_with(a, b, LdnDenominator::Max)
}

/// Length-normalized edit distance with an explicit denominator convention.
pub fn ldn_with<F: Scalar>(a: &str, b: &str, denom: LdnDenominator) -> Result<F, StrsimError> {
    let la = a.chars().count();
    let lb = b.chars().count();
    if la == 0 && lb == 0 {
        return Err(StrsimError::BothEmpty);
    }
    let d = F::from_usize(edit_distance(a, b)).unwrap();
    let denom = match denom {
        LdnDenominator::Max => F::from_usize(la.max(lb)).unwrap(),
        LdnDenominator::Average => {
            F::from_usize(la + lb).unwrap() / F::from_f64(2.0).unwrap()
        }
    };
    Ok(d / denom)
}

fn bigram_set(s: &[char]) -> BTreeSet<(char, char)> {
    s.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Dice coefficient over the bigram *sets* of the two words.
///
/// Words shorter than two characters have no bigrams and score 0.
pub fn dice<F: Scalar>(a: &str, b: &str) -> F {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.len() < 2 || b.len() < 2 {
        return F::zero();
    }
    let sa = bigram_set(&a);
    let sb = bigram_set(&b);
    let shared = sa.intersection(&sb).count();
    let two = F::from_f64(2.0).unwrap();
    two * F::from_usize(shared).unwrap() / F::from_usize(sa.len() + sb.len()).unwrap()
}

/// Length of the longest common (non-contiguous) subsequence.
pub fn lcs_length(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; b.len() + 1];
    for &ca in &a {
        let mut diag = 0;
        for (j, &cb) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if ca == cb {
                diag + 1
            } else {
                up.max(row[j])
            };
            diag = up;
        }
    }
    row[b.len()]
}

/// Length of the maximal shared prefix.
pub fn common_prefix_len(a: &str, b: &str) -> usize {
    a.chars()
        .zip(b.chars())
        .take_while(|(ca, cb)| ca == cb)
        .count()
}

/// The six word-pair similarity features: edit distance, longest common
/// prefix, common bigram count (set semantics, consistent with [`dice`]), the
/// two word lengths, and their absolute difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HkFeatures {
    pub edit_distance: usize,
    pub common_prefix_len: usize,
    pub common_bigram_count: usize,
    pub len_a: usize,
    pub len_b: usize,
    pub abs_len_diff: usize,
}

pub fn hk_features(a: &str, b: &str) -> Result<HkFeatures, StrsimError> {
    let ca: Vec<char> = a.chars().collect();
    let cb: Vec<char> = b.chars().collect();
    if ca.is_empty() || cb.is_empty() {
        return Err(StrsimError::EmptyWord);
    }
    let common_bigram_count = bigram_set(&ca).intersection(&bigram_set(&cb)).count();
    Ok(HkFeatures {
        edit_distance: edit_distance(a, b),
        common_prefix_len: common_prefix_len(a, b),
        common_bigram_count,
        len_a: ca.len(),
        len_b: cb.len(),
        abs_len_diff: ca.len().abs_diff(cb.len()),
    })
}

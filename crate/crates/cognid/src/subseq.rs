//! Gap-weighted subsequence features.
//!
//! Every (not necessarily contiguous) subsequence `u` of a word `s` receives
//! the weight `φ(u) = Σ λ^(i_last − i_first + 1)`, summed over all strictly
//! increasing index sequences at which `u` occurs in `s`. Longer spans are
//! penalized exponentially via the decay factor `λ`; multiple occurrences
//! accumulate. Per word we build one vector over raw characters and one over
//! consonant/vowel classes, join them in disjoint namespaces, and normalize
//! the union to unit Euclidean length. A word pair is represented by the
//! intersection of its two unit vectors, each common key weighted by the sum
//! of the per-word weights.
//!
//! Weights are extracted explicitly per subsequence (the classifier trains in
//! the primal over explicit features), so the cost is the number of
//! aggregated subsequence states, worst case O(C(m, ≤p)) for word length m.
//! Final weights below 1e-12 are pruned.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::features::{FeatureKey, Namespace, SparseVector, SubseqKey};
use crate::{NeumaierSum, Scalar};

/// Longest supported word, in characters.
pub const MAX_WORD_LEN: usize = 64;
/// Largest supported subsequence length bound `p`.
pub const MAX_SUBSEQ_LEN: usize = 7;
/// Weights below this threshold are dropped from extracted vectors.
const PRUNE_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SubseqError {
    #[error("subsequence length bound must be in [1, {MAX_SUBSEQ_LEN}], got {0}")]
    InvalidLengthBound(usize),
    #[error("decay factor must be in [0, 1], got {0}")]
    InvalidDecay(f64),
    #[error("word of {len} characters exceeds the supported maximum of {MAX_WORD_LEN}")]
    WordTooLong { len: usize },
    #[error("subsequence features are undefined for an empty word")]
    EmptyWord,
    #[error("subsequence vector has zero norm and cannot be normalized")]
    ZeroNorm,
}

/// Which subsequence lengths contribute for a length bound `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthsMode {
    /// All lengths `1..=p`.
    #[default]
    Upto,
    /// Only length exactly `p`. Words shorter than `p` then have no
    /// subsequences at all and cannot be normalized.
    Exact,
}

/// When consonant/vowel class features participate in pair vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CvMode {
    /// Class features are part of every combined word vector.
    #[default]
    Always,
    /// Pair vectors use character features only, backing off to class
    /// features when the two words share no character subsequence.
    FallbackOnly,
}

/// Extraction parameters: decay factor `lambda` in `[0, 1]` (default 0.5) and
/// subsequence length bound `p` in `[1, 7]` (default 3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams<F = f64> {
    lambda: F,
    p: usize,
    lengths: LengthsMode,
    cv: CvMode,
}

impl<F: Scalar> Default for KernelParams<F> {
    fn default() -> Self {
        Self {
            lambda: F::from_f64(0.5).unwrap(),
            p: 3,
            lengths: LengthsMode::default(),
            cv: CvMode::default(),
        }
    }
}

impl<F: Scalar> KernelParams<F> {
    pub fn new(lambda: F, p: usize) -> Result<Self, SubseqError> {
        if !(1..=MAX_SUBSEQ_LEN).contains(&p) {
            return Err(SubseqError::InvalidLengthBound(p));
        }
        if !(lambda >= F::zero() && lambda <= F::one()) {
            return Err(SubseqError::InvalidDecay(lambda.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            lambda,
            p,
            ..Self::default()
        })
    }

    pub fn with_lengths(mut self, lengths: LengthsMode) -> Self {
        self.lengths = lengths;
        self
    }

    pub fn with_cv_mode(mut self, cv: CvMode) -> Self {
        self.cv = cv;
        self
    }

    pub fn lambda(&self) -> F {
        self.lambda
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn lengths(&self) -> LengthsMode {
        self.lengths
    }

    pub fn cv_mode(&self) -> CvMode {
        self.cv
    }

    fn includes_len(&self, k: usize) -> bool {
        match self.lengths {
            LengthsMode::Upto => k <= self.p,
            LengthsMode::Exact => k == self.p,
        }
    }
}

/// A sparse per-word subsequence vector with its cached Euclidean norm.
///
/// All stored weights are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SubseqVector<F = f64> {
    weights: BTreeMap<SubseqKey, F>,
    norm: F,
}

impl<F: Scalar> SubseqVector<F> {
    fn from_weights(weights: BTreeMap<SubseqKey, F>) -> Self {
        let mut sq = NeumaierSum::new();
        for &w in weights.values() {
            sq.add(w * w);
        }
        Self {
            norm: sq.total().sqrt(),
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn norm(&self) -> F {
        self.norm
    }

    pub fn get(&self, key: &SubseqKey) -> Option<F> {
        self.weights.get(key).copied()
    }

    /// Entries in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&SubseqKey, F)> {
        self.weights.iter().map(|(k, &w)| (k, w))
    }

    /// Divides every weight by the norm, yielding a unit vector.
    pub fn normalized(mut self) -> Result<Self, SubseqError> {
        if !(self.norm > F::zero()) {
            return Err(SubseqError::ZeroNorm);
        }
        let norm = self.norm;
        for w in self.weights.values_mut() {
            *w = *w / norm;
        }
        Ok(Self::from_weights(self.weights))
    }
}

fn is_vowel(c: char) -> bool {
    let mut lower = c.to_lowercase();
    matches!(
        (lower.next(), lower.next()),
        (Some('a' | 'e' | 'i' | 'o' | 'u' | 'y'), None)
    )
}

/// Maps a word to its consonant/vowel class sequence over `{C, V}`.
///
/// Vowels are `a e i o u y`, case-folded; every other character (including
/// accented vowel letters, which are not stripped) is a consonant. Length is
/// preserved.
pub fn cv_map(s: &str) -> String {
    s.chars().map(|c| if is_vowel(c) { 'V' } else { 'C' }).collect()
}

/// Accumulates φ(u) for every subsequence of `chars` with an included length,
/// by extending occurrence states one layer per length. A state is a
/// (subsequence, first index, last index) triple with its occurrence count,
/// so repeated occurrences aggregate instead of being enumerated one by one.
fn raw_weights<F: Scalar>(chars: &[char], params: &KernelParams<F>) -> BTreeMap<String, F> {
    type Occurrences = BTreeMap<(u8, u8), u64>;
    let m = chars.len();
    let lambda = params.lambda;
    let mut sums: BTreeMap<String, NeumaierSum<F>> = BTreeMap::new();

    let mut layer: BTreeMap<String, Occurrences> = BTreeMap::new();
    for (i, &c) in chars.iter().enumerate() {
        *layer
            .entry(c.to_string())
            .or_default()
            .entry((i as u8, i as u8))
            .or_insert(0) += 1;
    }

    for k in 1..=params.p {
        if layer.is_empty() {
            break;
        }
        if params.includes_len(k) {
            for (u, occurrences) in &layer {
                let acc = sums.entry(u.clone()).or_insert_with(NeumaierSum::new);
                for (&(first, last), &count) in occurrences {
                    let span = (last - first + 1) as i32;
                    acc.add(F::from_u64(count).unwrap() * lambda.powi(span));
                }
            }
        }
        if k == params.p {
            break;
        }
        let mut next: BTreeMap<String, Occurrences> = BTreeMap::new();
        for (u, occurrences) in &layer {
            for (&(first, last), &count) in occurrences {
                for j in (last as usize + 1)..m {
                    let mut extended = u.clone();
                    extended.push(chars[j]);
                    *next
                        .entry(extended)
                        .or_default()
                        .entry((first, j as u8))
                        .or_insert(0) += count;
                }
            }
        }
        layer = next;
    }

    let eps = F::from_f64(PRUNE_EPS).unwrap();
    sums.into_iter()
        .filter_map(|(u, acc)| {
            let w = acc.total();
            (w >= eps).then_some((u, w))
        })
        .collect()
}

/// Un-normalized subsequence weights of one word in one namespace.
///
/// For [`Namespace::Cv`] the word is passed through [`cv_map`] first, so CV
/// keys only ever contain the symbols `C` and `V`.
pub fn subseq_weights<F: Scalar>(
    s: &str,
    params: &KernelParams<F>,
    namespace: Namespace,
) -> Result<SubseqVector<F>, SubseqError> {
    let mapped;
    let text = match namespace {
        Namespace::Char => s,
        Namespace::Cv => {
            mapped = cv_map(s);
            &mapped
        }
    };
    let chars: Vec<char> = text.chars().collect();
    if chars.len() > MAX_WORD_LEN {
        return Err(SubseqError::WordTooLong { len: chars.len() });
    }
    let weights = raw_weights(&chars, params)
        .into_iter()
        .map(|(u, w)| (SubseqKey::new(namespace, u), w))
        .collect();
    Ok(SubseqVector::from_weights(weights))
}

/// The unit-normalized union of a word's character-namespace weights and the
/// class-namespace weights of its consonant/vowel sequence.
///
/// The two namespaces are disjoint, so the union never collides. A zero decay
/// factor drives every weight to zero and therefore fails with
/// [`SubseqError::ZeroNorm`].
pub fn combined_vector<F: Scalar>(
    s: &str,
    params: &KernelParams<F>,
) -> Result<SubseqVector<F>, SubseqError> {
    if s.is_empty() {
        return Err(SubseqError::EmptyWord);
    }
    let mut weights = subseq_weights(s, params, Namespace::Char)?.weights;
    weights.extend(subseq_weights(s, params, Namespace::Cv)?.weights);
    SubseqVector::from_weights(weights).normalized()
}

fn intersect<F: Scalar>(a: &SubseqVector<F>, b: &SubseqVector<F>) -> SparseVector<F> {
    let mut entries = Vec::new();
    for (key, wa) in a.iter() {
        if let Some(wb) = b.get(key) {
            entries.push((FeatureKey::Subseq(key.clone()), wa + wb));
        }
    }
    SparseVector::from_entries(entries)
}

/// The common-subsequence pair vector: the intersection of the two words'
/// unit vectors, each key weighted `φ_u^{s1} + φ_u^{s2}`. An empty
/// intersection is a valid empty vector.
///
/// Under [`CvMode::FallbackOnly`] each word vector is normalized over the
/// character namespace alone, and the class namespace is consulted only when
/// the character intersection is empty.
pub fn pair_features<F: Scalar>(
    s1: &str,
    s2: &str,
    params: &KernelParams<F>,
) -> Result<SparseVector<F>, SubseqError> {
    match params.cv {
        CvMode::Always => {
            let v1 = combined_vector(s1, params)?;
            let v2 = combined_vector(s2, params)?;
            Ok(intersect(&v1, &v2))
        }
        CvMode::FallbackOnly => {
            if s1.is_empty() || s2.is_empty() {
                return Err(SubseqError::EmptyWord);
            }
            let c1 = subseq_weights(s1, params, Namespace::Char)?.normalized()?;
            let c2 = subseq_weights(s2, params, Namespace::Char)?.normalized()?;
            let shared = intersect(&c1, &c2);
            if !shared.is_empty() {
                return Ok(shared);
            }
            let v1 = subseq_weights(s1, params, Namespace::Cv)?.normalized()?;
            let v2 = subseq_weights(s2, params, Namespace::Cv)?.normalized()?;
            Ok(intersect(&v1, &v2))
        }
    }
}

/// Number of distinct subsequence keys any pair vector over `words` could
/// draw from: the union of both namespaces' key sets across the distinct
/// words. Empty words contribute nothing.
pub fn feature_space_size<'a, F, I>(words: I, params: &KernelParams<F>) -> Result<usize, SubseqError>
where
    F: Scalar,
    I: IntoIterator<Item = &'a str>,
{
    let mut keys = std::collections::BTreeSet::new();
    let mut seen = std::collections::BTreeSet::new();
    for word in words {
        if word.is_empty() || !seen.insert(word) {
            continue;
        }
        keys.extend(subseq_weights::<F>(word, params, Namespace::Char)?.weights.into_keys());
        keys.extend(subseq_weights::<F>(word, params, Namespace::Cv)?.weights.into_keys());
    }
    Ok(keys.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(lambda: f64, p: usize) -> KernelParams<f64> {
        KernelParams::new(lambda, p).unwrap()
    }

    fn char_key(symbols: &str) -> SubseqKey {
        SubseqKey::new(Namespace::Char, symbols)
    }

    fn cv_key(symbols: &str) -> SubseqKey {
        SubseqKey::new(Namespace::Cv, symbols)
    }

    /// Brute force: enumerate every strictly increasing index sequence of
    /// each included length and add λ^span one occurrence at a time.
    fn oracle_weights(s: &str, params: &KernelParams<f64>) -> BTreeMap<String, f64> {
        fn recurse(
            chars: &[char],
            lambda: f64,
            start: usize,
            indices: &mut Vec<usize>,
            max_len: usize,
            include: &dyn Fn(usize) -> bool,
            out: &mut BTreeMap<String, f64>,
        ) {
            if !indices.is_empty() && include(indices.len()) {
                let u: String = indices.iter().map(|&i| chars[i]).collect();
                let span = indices[indices.len() - 1] - indices[0] + 1;
                *out.entry(u).or_insert(0.0) += lambda.powi(span as i32);
            }
            if indices.len() == max_len {
                return;
            }
            for i in start..chars.len() {
                indices.push(i);
                recurse(chars, lambda, i + 1, indices, max_len, include, out);
                indices.pop();
            }
        }
        let chars: Vec<char> = s.chars().collect();
        let mut out = BTreeMap::new();
        let p = params.p();
        let lengths = params.lengths();
        recurse(
            &chars,
            params.lambda(),
            0,
            &mut Vec::new(),
            p,
            &|k| match lengths {
                LengthsMode::Upto => k <= p,
                LengthsMode::Exact => k == p,
            },
            &mut out,
        );
        out.retain(|_, w| *w >= 1e-12);
        out
    }

    fn assert_matches_oracle(s: &str, params: &KernelParams<f64>) {
        let got = subseq_weights(s, params, Namespace::Char).unwrap();
        let want = oracle_weights(s, params);
        assert_eq!(
            got.iter().map(|(k, _)| k.symbols.clone()).collect::<Vec<_>>(),
            want.keys().cloned().collect::<Vec<_>>(),
            "key sets differ for {s:?}"
        );
        for (key, weight) in got.iter() {
            let expected = want[&key.symbols];
            assert!(
                (weight - expected).abs() <= 1e-12,
                "weight mismatch for {s:?} key {key:?}: {weight} vs {expected}"
            );
        }
    }

    #[test]
    fn cv_map_examples() {
        assert_eq!(cv_map("pissi"), "CVCCV");
        assert_eq!(cv_map(""), "");
        assert_eq!(cv_map("y"), "V");
        assert_eq!(cv_map("AeIoUY"), "VVVVVV");
        assert_eq!(cv_map("bcd-!"), "CCCCC");
    }

    #[test]
    fn cv_map_keeps_accented_vowels_as_consonants() {
        assert_eq!(cv_map("étui"), "CCVV");
    }

    #[test]
    fn pissi_ps_weight_is_lambda3_plus_lambda4() {
        let v = subseq_weights("pissi", &params(0.5, 2), Namespace::Char).unwrap();
        assert_eq!(v.get(&char_key("ps")), Some(0.1875));
    }

    #[test]
    fn single_char_word_single_weight() {
        let v = subseq_weights("a", &params(0.5, 1), Namespace::Char).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.get(&char_key("a")), Some(0.5));
    }

    #[test]
    fn abc_p2_full_weight_table() {
        let v = subseq_weights("abc", &params(0.5, 2), Namespace::Char).unwrap();
        let expected = [
            ("a", 0.5),
            ("b", 0.5),
            ("c", 0.5),
            ("ab", 0.25),
            ("ac", 0.125),
            ("bc", 0.25),
        ];
        assert_eq!(v.len(), expected.len());
        for (symbols, weight) in expected {
            assert_eq!(v.get(&char_key(symbols)), Some(weight), "key {symbols}");
        }
    }

    #[test]
    fn lambda_one_counts_occurrences() {
        let v = subseq_weights("aa", &params(1.0, 2), Namespace::Char).unwrap();
        assert_eq!(v.get(&char_key("a")), Some(2.0));
        assert_eq!(v.get(&char_key("aa")), Some(1.0));
    }

    #[test]
    fn lambda_zero_prunes_everything() {
        let v = subseq_weights("abc", &params(0.0, 2), Namespace::Char).unwrap();
        assert!(v.is_empty());
        assert_eq!(
            combined_vector("abc", &params(0.0, 2)).unwrap_err(),
            SubseqError::ZeroNorm
        );
    }

    #[test]
    fn exact_lengths_mode_keeps_only_p() {
        let p = params(0.5, 2).with_lengths(LengthsMode::Exact);
        let v = subseq_weights("abc", &p, Namespace::Char).unwrap();
        let keys: Vec<String> = v.iter().map(|(k, _)| k.symbols.clone()).collect();
        assert_eq!(keys, ["ab", "ac", "bc"]);
    }

    #[test]
    fn cv_namespace_maps_before_extraction() {
        let v = subseq_weights("pissi", &params(0.5, 1), Namespace::Cv).unwrap();
        assert_eq!(v.get(&cv_key("C")), Some(1.5));
        assert_eq!(v.get(&cv_key("V")), Some(1.0));
    }

    #[test]
    fn occurrences_with_larger_span_weigh_less() {
        // "ps" in "psps": spans 2, 2 and 4.
        let v = subseq_weights("psps", &params(0.5, 2), Namespace::Char).unwrap();
        let lambda: f64 = 0.5;
        let expected = 2.0 * lambda.powi(2) + lambda.powi(4);
        assert!((v.get(&char_key("ps")).unwrap() - expected).abs() < 1e-15);
        for span in 1..10 {
            assert!(lambda.powi(span + 1) < lambda.powi(span));
        }
    }

    #[test]
    fn word_length_bound_enforced() {
        let ok = "a".repeat(MAX_WORD_LEN);
        assert!(subseq_weights(&ok, &params(0.5, 2), Namespace::Char).is_ok());
        let long = "a".repeat(MAX_WORD_LEN + 1);
        assert_eq!(
            subseq_weights(&long, &params(0.5, 2), Namespace::Char).unwrap_err(),
            SubseqError::WordTooLong { len: MAX_WORD_LEN + 1 }
        );
    }

    #[test]
    fn params_validation() {
        assert_eq!(
            KernelParams::<f64>::new(0.5, 0).unwrap_err(),
            SubseqError::InvalidLengthBound(0)
        );
        assert_eq!(
            KernelParams::<f64>::new(0.5, 8).unwrap_err(),
            SubseqError::InvalidLengthBound(8)
        );
        assert!(matches!(
            KernelParams::<f64>::new(-0.1, 3),
            Err(SubseqError::InvalidDecay(_))
        ));
        assert!(matches!(
            KernelParams::<f64>::new(1.5, 3),
            Err(SubseqError::InvalidDecay(_))
        ));
        assert!(matches!(
            KernelParams::<f64>::new(f64::NAN, 3),
            Err(SubseqError::InvalidDecay(_))
        ));
        let d = KernelParams::<f64>::default();
        assert_eq!(d.lambda(), 0.5);
        assert_eq!(d.p(), 3);
    }

    #[test]
    fn combined_vector_aa_splits_evenly() {
        let v = combined_vector("aa", &params(0.5, 1)).unwrap();
        let expected = 1.0 / 2.0f64.sqrt();
        assert_eq!(v.len(), 2);
        assert!((v.get(&char_key("a")).unwrap() - expected).abs() < 1e-12);
        assert!((v.get(&cv_key("V")).unwrap() - expected).abs() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn combined_vector_keeps_char_and_cv_keys() {
        let v = combined_vector("pissi", &params(0.5, 2)).unwrap();
        assert!(v.get(&char_key("ps")).is_some());
        assert!(v.get(&cv_key("CV")).is_some());
        assert_eq!(
            combined_vector("", &params(0.5, 2)).unwrap_err(),
            SubseqError::EmptyWord
        );
    }

    #[test]
    fn pair_features_identical_words_double_weights() {
        let p = params(0.5, 3);
        let v = combined_vector("night", &p).unwrap();
        let pair = pair_features("night", "night", &p).unwrap();
        assert_eq!(pair.len(), v.len());
        for (key, weight) in v.iter() {
            let got = pair.get(&FeatureKey::Subseq(key.clone())).unwrap();
            assert!((got - 2.0 * weight).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_chars_still_share_class_features() {
        let p = params(0.5, 1);
        let pair = pair_features("ab", "cd", &p).unwrap();
        assert!(pair.get(&FeatureKey::Subseq(cv_key("C"))).is_some());
        for (key, _) in pair.iter() {
            match key {
                FeatureKey::Subseq(k) => assert_eq!(k.namespace, Namespace::Cv),
                other => panic!("unexpected key {other:?}"),
            }
        }
    }

    #[test]
    fn fallback_mode_uses_chars_when_shared() {
        let p = params(0.5, 2).with_cv_mode(CvMode::FallbackOnly);
        let pair = pair_features("hound", "hund", &p).unwrap();
        assert!(!pair.is_empty());
        for (key, _) in pair.iter() {
            match key {
                FeatureKey::Subseq(k) => assert_eq!(k.namespace, Namespace::Char),
                other => panic!("unexpected key {other:?}"),
            }
        }
    }

    #[test]
    fn fallback_mode_backs_off_to_classes() {
        let p = params(0.5, 2).with_cv_mode(CvMode::FallbackOnly);
        let pair = pair_features("ab", "cd", &p).unwrap();
        assert!(!pair.is_empty());
        for (key, _) in pair.iter() {
            match key {
                FeatureKey::Subseq(k) => assert_eq!(k.namespace, Namespace::Cv),
                other => panic!("unexpected key {other:?}"),
            }
        }
    }

    #[test]
    fn feature_space_size_examples() {
        let p = params(0.5, 1);
        assert_eq!(feature_space_size(["ab"], &p).unwrap(), 4);
        assert_eq!(feature_space_size::<f64, [&str; 0]>([], &p).unwrap(), 0);
        assert_eq!(feature_space_size(["ab", "ab"], &p).unwrap(), 4);
        assert_eq!(feature_space_size(["ab", ""], &p).unwrap(), 4);
    }

    #[test]
    fn oracle_agreement_on_fixed_cases() {
        for s in ["pissi", "piscis", "aaaa", "abcabc", "xyxyxyxy"] {
            for p in 1..=4 {
                assert_matches_oracle(s, &params(0.5, p));
                assert_matches_oracle(s, &params(0.5, p).with_lengths(LengthsMode::Exact));
            }
        }
    }

    proptest! {
        #[test]
        fn oracle_agreement(
            s in proptest::string::string_regex("[a-f]{0,8}").unwrap(),
            p in 1usize..=4,
            lambda in 0.05f64..=1.0,
        ) {
            assert_matches_oracle(&s, &params(lambda, p));
        }

        #[test]
        fn combined_vectors_have_unit_norm(
            s in proptest::string::string_regex("[a-f]{1,8}").unwrap(),
            p in 1usize..=4,
            lambda in 0.05f64..=1.0,
        ) {
            let v = combined_vector(&s, &params(lambda, p)).unwrap();
            prop_assert!((v.norm() - 1.0).abs() <= 1e-9);
            let sum_sq: f64 = v.iter().map(|(_, w)| w * w).sum();
            prop_assert!((sum_sq.sqrt() - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn pair_features_symmetric(
            a in proptest::string::string_regex("[a-f]{1,6}").unwrap(),
            b in proptest::string::string_regex("[a-f]{1,6}").unwrap(),
            p in 1usize..=3,
        ) {
            let kp = params(0.5, p);
            prop_assert_eq!(
                pair_features(&a, &b, &kp).unwrap(),
                pair_features(&b, &a, &kp).unwrap()
            );
        }
    }
}

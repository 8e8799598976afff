//! Sparse feature vectors and the textual feature-dump format.
//!
//! Feature keys are either namespaced subsequences (`char|…`, `cv|…`) or named
//! word-pair similarity features (`hk|…`). A dump line is
//! `label<SPACE>key:weight …` with weights rendered to 12 significant digits
//! so that dumps are byte-diffable across runs.

use std::fmt;

use thiserror::Error;

use crate::Scalar;

/// Namespace of a subsequence key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    /// Subsequence over the raw characters of the word.
    Char,
    /// Subsequence over the consonant/vowel class sequence of the word.
    Cv,
}

impl Namespace {
    pub fn as_str(self) -> &'static str {
        match self {
            Namespace::Char => "char",
            Namespace::Cv => "cv",
        }
    }
}

/// A namespaced subsequence: an ordered sequence of characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubseqKey {
    pub namespace: Namespace,
    pub symbols: String,
}

impl SubseqKey {
    pub fn new(namespace: Namespace, symbols: impl Into<String>) -> Self {
        Self {
            namespace,
            symbols: symbols.into(),
        }
    }
}

/// Key of one sparse feature: a subsequence or a named similarity feature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKey {
    Subseq(SubseqKey),
    /// Named word-pair feature in the `hk` namespace, e.g. `edit_distance`.
    Named(String),
}

impl FeatureKey {
    pub fn subseq(namespace: Namespace, symbols: impl Into<String>) -> Self {
        FeatureKey::Subseq(SubseqKey::new(namespace, symbols))
    }

    pub fn named(name: impl Into<String>) -> Self {
        FeatureKey::Named(name.into())
    }

    /// Renders the key as `ns|symbols` with `%`, `:` and whitespace
    /// percent-escaped so the dump line stays splittable.
    pub fn render(&self) -> String {
        match self {
            FeatureKey::Subseq(k) => format!("{}|{}", k.namespace.as_str(), escape(&k.symbols)),
            FeatureKey::Named(name) => format!("hk|{}", escape(name)),
        }
    }

    /// Parses the `ns|symbols` rendering back into a key.
    pub fn parse(text: &str) -> Result<Self, DumpError> {
        let (ns, rest) = text
            .split_once('|')
            .ok_or_else(|| DumpError::BadKey(text.to_string()))?;
        let symbols = unescape(rest).ok_or_else(|| DumpError::BadKey(text.to_string()))?;
        match ns {
            "char" => Ok(FeatureKey::subseq(Namespace::Char, symbols)),
            "cv" => Ok(FeatureKey::subseq(Namespace::Cv, symbols)),
            "hk" => Ok(FeatureKey::named(symbols)),
            _ => Err(DumpError::BadKey(text.to_string())),
        }
    }
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn needs_escape(b: u8) -> bool {
    matches!(b, b'%' | b':' | b' ' | b'\t' | b'\n' | b'\r')
}

fn escape(s: &str) -> String {
    if !s.bytes().any(needs_escape) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 4);
    for ch in s.chars() {
        if ch.is_ascii() && needs_escape(ch as u8) {
            out.push_str(&format!("%{:02X}", ch as u8));
        } else {
            out.push(ch);
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut parts = s.split('%');
    let mut out = String::from(parts.next()?);
    for part in parts {
        let hex = part.get(0..2)?;
        let b = u8::from_str_radix(hex, 16).ok()?;
        // Only ASCII separators are ever escaped by `escape`.
        if !b.is_ascii() {
            return None;
        }
        out.push(b as char);
        out.push_str(part.get(2..)?);
    }
    Some(out)
}

/// Renders a float with 12 significant digits in scientific notation.
pub fn format_sig12<F: Scalar>(x: F) -> String {
    format!("{:.11e}", x.to_f64().unwrap_or(f64::NAN))
}

/// Errors from reading the feature-dump format.
#[derive(Debug, Error)]
pub enum DumpError {
    #[error("malformed feature key `{0}`")]
    BadKey(String),
    #[error("malformed dump line: {0}")]
    BadLine(String),
}

/// A sparse feature vector: keys sorted and unique, values real.
///
/// Unlike [`crate::subseq::SubseqVector`], zero values are allowed here: the
/// named similarity features are dense and a zero (e.g. no common prefix) is
/// meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<F = f64> {
    entries: Vec<(FeatureKey, F)>,
}

impl<F: Scalar> SparseVector<F> {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// Builds from entries, sorting by key. Panics on duplicate keys.
    pub fn from_entries(mut entries: Vec<(FeatureKey, F)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate feature key {}", w[0].0);
        }
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FeatureKey, F)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }

    pub fn get(&self, key: &FeatureKey) -> Option<F> {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(key))
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Scales every value by `factor`.
    pub fn scaled(&self, factor: F) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), *v * factor))
                .collect(),
        }
    }

    /// Merges two vectors with disjoint key sets. Panics on overlap.
    pub fn concat(mut self, other: Self) -> Self {
        self.entries.extend(other.entries);
        Self::from_entries(self.entries)
    }

    /// Renders one dump line: `label key:weight key:weight …`.
    pub fn render_line(&self, label: bool) -> String {
        let mut line = String::new();
        line.push(if label { '1' } else { '0' });
        for (key, value) in &self.entries {
            line.push(' ');
            line.push_str(&key.render());
            line.push(':');
            line.push_str(&format_sig12(*value));
        }
        line
    }

    /// Parses a dump line back into `(label, vector)`.
    pub fn parse_line(line: &str) -> Result<(bool, Self), DumpError> {
        let mut parts = line.split(' ');
        let label = match parts.next() {
            Some("1") => true,
            Some("0") => false,
            _ => return Err(DumpError::BadLine(format!("bad label in `{line}`"))),
        };
        let mut entries = Vec::new();
        for part in parts {
            if part.is_empty() {
                continue;
            }
            let (key_text, value_text) = part
                .rsplit_once(':')
                .ok_or_else(|| DumpError::BadLine(format!("missing `:` in `{part}`")))?;
            let key = FeatureKey::parse(key_text)?;
            let value = value_text
                .parse::<f64>()
                .ok()
                .and_then(F::from_f64)
                .ok_or_else(|| DumpError::BadLine(format!("bad weight `{value_text}`")))?;
            entries.push((key, value));
        }
        Ok((label, Self::from_entries(entries)))
    }
}

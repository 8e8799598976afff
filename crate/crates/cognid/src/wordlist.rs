//! Word list ingestion and pair generation.
//!
//! A word list is a TSV table of `(concept_id, gloss, language, form, ccn)`
//! rows where `ccn` is the cognate class number: two words of the same
//! concept are cognate iff their CCNs are equal. From a deduplicated list we
//! generate every unordered cross-language word pair per concept, labeled by
//! CCN equality, and build the train/test partitions used downstream.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Languages whose subfamily is unknown, plus subfamilies too small to split
/// on their own, end up in this group.
pub const DEFAULT_SUBFAMILY: &str = "Others";
/// Subfamilies smaller than this are merged into [`DEFAULT_SUBFAMILY`]
/// before splitting.
pub const MIN_SUBFAMILY_SIZE: usize = 10;

const PAIRS_HEADER: &str = "concept_id\tlang_a\tlang_b\tform_a\tform_b\tlabel";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordlistError {
    #[error("line {line}: expected a header row starting with \"concept_id\"")]
    MissingHeader { line: usize },
    #[error("line {line}: expected {expected} tab-separated columns, found {found}")]
    BadColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {field} is not an integer: {value:?}")]
    BadInteger {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: label must be 0 or 1, got {value:?}")]
    BadLabel { line: usize, value: String },
    #[error("line {line}: empty form")]
    EmptyForm { line: usize },
    #[error("line {line}: duplicate subfamily row for language {language:?}")]
    DuplicateSubfamilyRow { line: usize, language: String },
    #[error("subfamily {name:?} has {size} language(s) after merging and cannot be split")]
    UnsplittableSubfamily { name: String, size: usize },
    #[error("cannot split {len} pair(s) into {k} fold(s)")]
    BadFoldCount { len: usize, k: usize },
}

/// One row of a word list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordEntry {
    pub concept_id: u32,
    pub gloss: String,
    pub language: String,
    pub form: String,
    pub ccn: i64,
}

/// An ordered word list plus the language → subfamily assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    entries: Vec<WordEntry>,
    subfamilies: BTreeMap<String, String>,
}

impl WordList {
    pub fn new(entries: Vec<WordEntry>) -> Self {
        Self {
            entries,
            subfamilies: BTreeMap::new(),
        }
    }

    pub fn entries(&self) -> &[WordEntry] {
        &self.entries
    }

    pub fn set_subfamilies(&mut self, subfamilies: BTreeMap<String, String>) {
        self.subfamilies = subfamilies;
    }

    /// Subfamily of a language, defaulting to [`DEFAULT_SUBFAMILY`].
    pub fn subfamily_of(&self, language: &str) -> &str {
        self.subfamilies
            .get(language)
            .map(String::as_str)
            .unwrap_or(DEFAULT_SUBFAMILY)
    }

    pub fn languages(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.language.as_str()).collect()
    }

    pub fn concepts(&self) -> BTreeSet<u32> {
        self.entries.iter().map(|e| e.concept_id).collect()
    }

    /// Restricts the list to entries whose language is in `languages`.
    pub fn filtered<S: AsRef<str>>(&self, languages: &BTreeSet<S>) -> Self {
        let keep: BTreeSet<&str> = languages.iter().map(AsRef::as_ref).collect();
        Self {
            entries: self
                .entries
                .iter()
                .filter(|e| keep.contains(e.language.as_str()))
                .cloned()
                .collect(),
            subfamilies: self.subfamilies.clone(),
        }
    }

    /// Languages grouped by subfamily, with groups smaller than
    /// [`MIN_SUBFAMILY_SIZE`] merged into [`DEFAULT_SUBFAMILY`].
    pub fn merged_subfamily_groups(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut raw: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
        for language in self.languages() {
            raw.entry(self.subfamily_of(language))
                .or_default()
                .insert(language.to_string());
        }
        let mut merged: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (name, languages) in raw {
            let target = if name == DEFAULT_SUBFAMILY || languages.len() < MIN_SUBFAMILY_SIZE {
                DEFAULT_SUBFAMILY
            } else {
                name
            };
            merged.entry(target.to_string()).or_default().extend(languages);
        }
        merged.retain(|_, languages| !languages.is_empty());
        merged
    }
}

/// A labeled cross-language word pair; `lang_a` sorts before `lang_b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledPair {
    pub concept_id: u32,
    pub lang_a: String,
    pub lang_b: String,
    pub form_a: String,
    pub form_b: String,
    pub label: bool,
}

/// Parses the word list TSV format: a header row, then
/// `concept_id<TAB>gloss<TAB>language<TAB>form<TAB>ccn` rows. Lines starting
/// with `#` and blank lines are ignored. Subfamilies start out empty.
pub fn parse_wordlist(text: &str) -> Result<WordList, WordlistError> {
    let mut entries = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line.split('\t').next().map(str::trim) != Some("concept_id") {
                return Err(WordlistError::MissingHeader { line: lineno });
            }
            saw_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(WordlistError::BadColumnCount {
                line: lineno,
                expected: 5,
                found: cols.len(),
            });
        }
        let concept_id = parse_int(cols[0], "concept_id", lineno)?;
        let ccn = parse_int(cols[4], "ccn", lineno)?;
        let form = cols[3].trim();
        if form.is_empty() {
            return Err(WordlistError::EmptyForm { line: lineno });
        }
        entries.push(WordEntry {
            concept_id,
            gloss: cols[1].trim().to_string(),
            language: cols[2].trim().to_string(),
            form: form.to_string(),
            ccn,
        });
    }
    if !saw_header {
        return Err(WordlistError::MissingHeader { line: 1 });
    }
    Ok(WordList::new(entries))
}

fn parse_int<T: std::str::FromStr>(
    value: &str,
    field: &'static str,
    line: usize,
) -> Result<T, WordlistError> {
    value.trim().parse().map_err(|_| WordlistError::BadInteger {
        line,
        field,
        value: value.trim().to_string(),
    })
}

/// Parses the subfamily TSV format: `language<TAB>subfamily` rows, no header
/// required (a leading `language` header row is tolerated). Lines starting
/// with `#` and blank lines are ignored; duplicate languages are an error.
pub fn parse_subfamilies(text: &str) -> Result<BTreeMap<String, String>, WordlistError> {
    let mut map = BTreeMap::new();
    let mut first_row = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(WordlistError::BadColumnCount {
                line: lineno,
                expected: 2,
                found: cols.len(),
            });
        }
        let language = cols[0].trim().to_string();
        if first_row {
            first_row = false;
            if language == "language" {
                continue;
            }
        }
        if map.insert(language.clone(), cols[1].trim().to_string()).is_some() {
            return Err(WordlistError::DuplicateSubfamilyRow {
                line: lineno,
                language,
            });
        }
    }
    Ok(map)
}

/// Keeps exactly one entry per (concept, language), chosen uniformly at
/// random among its synonyms by a generator seeded with `seed`. Groups are
/// visited in (concept, language) order and singleton groups consume no
/// random draws, so adding an unrelated language does not disturb the choices
/// made for others. The output is sorted by (concept, language).
pub fn dedupe_synonyms(wl: &WordList, seed: u64) -> WordList {
    let mut groups: BTreeMap<(u32, &str), Vec<&WordEntry>> = BTreeMap::new();
    for entry in &wl.entries {
        groups
            .entry((entry.concept_id, entry.language.as_str()))
            .or_default()
            .push(entry);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = groups
        .into_values()
        .map(|group| {
            let pick = if group.len() == 1 {
                0
            } else {
                rng.gen_range(0..group.len())
            };
            group[pick].clone()
        })
        .collect();
    WordList {
        entries,
        subfamilies: wl.subfamilies.clone(),
    }
}

/// Emits every unordered cross-language pair within each concept, labeled by
/// CCN equality, sorted by (concept, lang_a, lang_b). Expects a deduplicated
/// list; same-language pairs are never emitted.
pub fn generate_pairs(wl: &WordList) -> Vec<LabeledPair> {
    let mut by_concept: BTreeMap<u32, Vec<&WordEntry>> = BTreeMap::new();
    for entry in &wl.entries {
        by_concept.entry(entry.concept_id).or_default().push(entry);
    }
    let mut pairs = Vec::new();
    for (concept_id, mut group) in by_concept {
        group.sort_by(|a, b| {
            (&a.language, &a.form, a.ccn).cmp(&(&b.language, &b.form, b.ccn))
        });
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                if a.language == b.language {
                    continue;
                }
                pairs.push(LabeledPair {
                    concept_id,
                    lang_a: a.language.clone(),
                    lang_b: b.language.clone(),
                    form_a: a.form.clone(),
                    form_b: b.form.clone(),
                    label: a.ccn == b.ccn,
                });
            }
        }
    }
    pairs
}

/// Which side receives the extra language when a subfamily has odd size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitConvention {
    #[default]
    TrainGetsExtra,
    TestGetsExtra,
}

/// Splits the languages of every merged subfamily roughly in half, train side
/// first, using [`SplitConvention::TrainGetsExtra`].
pub fn subfamily_split(
    wl: &WordList,
    seed: u64,
) -> Result<(BTreeSet<String>, BTreeSet<String>), WordlistError> {
    subfamily_split_with(wl, seed, SplitConvention::default())
}

/// Splits each merged subfamily of size n into ⌈n/2⌉ + ⌊n/2⌋ languages, the
/// larger half going to the side named by `convention`. Subfamilies are
/// processed in name order with a single generator seeded by `seed`, so the
/// partition is a pure function of (word list, seed, convention).
pub fn subfamily_split_with(
    wl: &WordList,
    seed: u64,
    convention: SplitConvention,
) -> Result<(BTreeSet<String>, BTreeSet<String>), WordlistError> {
    let groups = wl.merged_subfamily_groups();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = BTreeSet::new();
    let mut test = BTreeSet::new();
    for (name, languages) in groups {
        if languages.len() < 2 {
            return Err(WordlistError::UnsplittableSubfamily {
                name,
                size: languages.len(),
            });
        }
        let mut languages: Vec<String> = languages.into_iter().collect();
        languages.shuffle(&mut rng);
        let n = languages.len();
        let train_size = match convention {
            SplitConvention::TrainGetsExtra => (n + 1) / 2,
            SplitConvention::TestGetsExtra => n / 2,
        };
        for (i, language) in languages.into_iter().enumerate() {
            if i < train_size {
                train.insert(language);
            } else {
                test.insert(language);
            }
        }
    }
    Ok((train, test))
}

/// Shuffles the pairs with a generator seeded by `seed` and cuts them into
/// `k` folds whose sizes differ by at most one, earlier folds taking the
/// remainder.
pub fn kfold_split(
    pairs: &[LabeledPair],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<LabeledPair>>, WordlistError> {
    if k < 2 || k > pairs.len() {
        return Err(WordlistError::BadFoldCount {
            len: pairs.len(),
            k,
        });
    }
    let mut indices: Vec<usize> = (0..pairs.len()).collect();
    indices.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = pairs.len() / k;
    let extra = pairs.len() % k;
    let mut folds = Vec::with_capacity(k);
    let mut offset = 0;
    for i in 0..k {
        let size = base + usize::from(i < extra);
        folds.push(
            indices[offset..offset + size]
                .iter()
                .map(|&idx| pairs[idx].clone())
                .collect(),
        );
        offset += size;
    }
    Ok(folds)
}

/// Renders pairs as TSV with a header row.
pub fn render_pairs(pairs: &[LabeledPair]) -> String {
    let mut out = String::from(PAIRS_HEADER);
    out.push('\n');
    for pair in pairs {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            pair.concept_id,
            pair.lang_a,
            pair.lang_b,
            pair.form_a,
            pair.form_b,
            u8::from(pair.label)
        ));
    }
    out
}

/// Parses the pair dump TSV format; a header row, `#` comments and blank
/// lines are tolerated.
pub fn parse_pairs(text: &str) -> Result<Vec<LabeledPair>, WordlistError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.first().map(|c| c.trim()) == Some("concept_id") {
            continue;
        }
        if cols.len() != 6 {
            return Err(WordlistError::BadColumnCount {
                line: lineno,
                expected: 6,
                found: cols.len(),
            });
        }
        let concept_id = parse_int(cols[0], "concept_id", lineno)?;
        let form_a = cols[3].trim();
        let form_b = cols[4].trim();
        if form_a.is_empty() || form_b.is_empty() {
            return Err(WordlistError::EmptyForm { line: lineno });
        }
        let label = match cols[5].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(WordlistError::BadLabel {
                    line: lineno,
                    value: other.to_string(),
                })
            }
        };
        pairs.push(LabeledPair {
            concept_id,
            lang_a: cols[1].trim().to_string(),
            lang_b: cols[2].trim().to_string(),
            form_a: form_a.to_string(),
            form_b: form_b.to_string(),
            label,
        });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entry(concept_id: u32, language: &str, form: &str, ccn: i64) -> WordEntry {
        WordEntry {
            concept_id,
            gloss: format!("gloss{concept_id}"),
            language: language.to_string(),
            form: form.to_string(),
            ccn,
        }
    }

    const SAMPLE: &str = "concept_id\tgloss\tlanguage\tform\tccn\n\
        # a comment\n\
        1\tall\tEnglish\tall\t1\n\
        1\tall\tGerman\talle\t1\n\
        1\tall\tFrench\ttout\t2\n\
        2\tand\tEnglish\tand\t7\n\
        \n\
        2\tand\tGerman\tund\t7\n";

    #[test]
    fn parses_rows_and_skips_comments_and_blanks() {
        let wl = parse_wordlist(SAMPLE).unwrap();
        assert_eq!(wl.entries().len(), 5);
        assert_eq!(wl.concepts().len(), 2);
        assert_eq!(wl.languages().len(), 3);
        assert_eq!(wl.entries()[2].form, "tout");
        assert_eq!(wl.entries()[2].ccn, 2);
    }

    #[test]
    fn rejects_missing_header() {
        let err = parse_wordlist("1\tall\tEnglish\tall\t1\n").unwrap_err();
        assert_eq!(err, WordlistError::MissingHeader { line: 1 });
    }

    #[test]
    fn rejects_wrong_column_count_with_line_number() {
        let text = "concept_id\tgloss\tlanguage\tform\tccn\n1\tall\tEnglish\tall\n";
        assert_eq!(
            parse_wordlist(text).unwrap_err(),
            WordlistError::BadColumnCount {
                line: 2,
                expected: 5,
                found: 4
            }
        );
    }

    #[test]
    fn rejects_non_integer_ccn() {
        let text = "concept_id\tgloss\tlanguage\tform\tccn\n1\tall\tEnglish\tall\tx\n";
        assert!(matches!(
            parse_wordlist(text).unwrap_err(),
            WordlistError::BadInteger {
                line: 2,
                field: "ccn",
                ..
            }
        ));
    }

    #[test]
    fn rejects_empty_form() {
        let text = "concept_id\tgloss\tlanguage\tform\tccn\n1\tall\tEnglish\t \t1\n";
        assert_eq!(
            parse_wordlist(text).unwrap_err(),
            WordlistError::EmptyForm { line: 2 }
        );
    }

    #[test]
    fn handles_crlf_input() {
        let text = "concept_id\tgloss\tlanguage\tform\tccn\r\n1\tall\tEnglish\tall\t1\r\n";
        let wl = parse_wordlist(text).unwrap();
        assert_eq!(wl.entries()[0].ccn, 1);
    }

    #[test]
    fn subfamily_parsing_and_default() {
        let mut wl = parse_wordlist(SAMPLE).unwrap();
        let map = parse_subfamilies("language\tsubfamily\nEnglish\tGermanic\nGerman\tGermanic\n")
            .unwrap();
        wl.set_subfamilies(map);
        assert_eq!(wl.subfamily_of("English"), "Germanic");
        assert_eq!(wl.subfamily_of("French"), DEFAULT_SUBFAMILY);
    }

    #[test]
    fn subfamily_duplicate_language_rejected() {
        let err = parse_subfamilies("English\tGermanic\nEnglish\tRomance\n").unwrap_err();
        assert_eq!(
            err,
            WordlistError::DuplicateSubfamilyRow {
                line: 2,
                language: "English".to_string()
            }
        );
    }

    #[test]
    fn dedupe_is_deterministic_and_covers_all_synonyms() {
        let wl = WordList::new(vec![
            entry(1, "L1", "a", 1),
            entry(1, "L1", "b", 2),
            entry(1, "L1", "c", 3),
            entry(1, "L2", "x", 1),
        ]);
        let first = dedupe_synonyms(&wl, 7);
        assert_eq!(first, dedupe_synonyms(&wl, 7));
        assert_eq!(first.entries().len(), 2);

        let mut chosen = BTreeSet::new();
        for seed in 0..50 {
            let deduped = dedupe_synonyms(&wl, seed);
            chosen.insert(deduped.entries()[0].form.clone());
        }
        assert_eq!(chosen.len(), 3, "every synonym should be reachable");
    }

    #[test]
    fn dedupe_without_synonyms_is_identity_up_to_order() {
        let wl = WordList::new(vec![
            entry(2, "L2", "y", 1),
            entry(1, "L1", "a", 1),
            entry(1, "L2", "x", 1),
        ]);
        let deduped = dedupe_synonyms(&wl, 0);
        assert_eq!(deduped.entries().len(), 3);
        assert_eq!(deduped.entries()[0].form, "a");
        assert_eq!(deduped.entries()[2].form, "y");
    }

    #[test]
    fn dedupe_keeps_one_entry_per_group() {
        let mut entries = Vec::new();
        for concept in 1..=3 {
            for lang in ["L1", "L2"] {
                entries.push(entry(concept, lang, "w1", 1));
                entries.push(entry(concept, lang, "w2", 2));
            }
        }
        let deduped = dedupe_synonyms(&WordList::new(entries), 42);
        assert_eq!(deduped.entries().len(), 6);
    }

    #[test]
    fn pairs_for_shared_ccn_concept() {
        let wl = WordList::new(vec![
            entry(1, "A", "wa", 5),
            entry(1, "B", "wb", 5),
            entry(1, "C", "wc", 5),
        ]);
        let pairs = generate_pairs(&wl);
        assert_eq!(pairs.len(), 3);
        assert!(pairs.iter().all(|p| p.label));
    }

    #[test]
    fn pair_labels_follow_ccn_equality() {
        let wl = WordList::new(vec![
            entry(1, "A", "wa", 1),
            entry(1, "B", "wb", 1),
            entry(1, "C", "wc", 2),
        ]);
        let pairs = generate_pairs(&wl);
        let labels: Vec<(&str, &str, bool)> = pairs
            .iter()
            .map(|p| (p.lang_a.as_str(), p.lang_b.as_str(), p.label))
            .collect();
        assert_eq!(
            labels,
            vec![("A", "B", true), ("A", "C", false), ("B", "C", false)]
        );
    }

    #[test]
    fn identical_non_cognate_pairs_are_kept() {
        let wl = WordList::new(vec![
            entry(1, "A", "same", 1),
            entry(1, "B", "same", 2),
        ]);
        let pairs = generate_pairs(&wl);
        assert_eq!(pairs.len(), 1);
        assert!(!pairs[0].label);
        assert_eq!(pairs[0].form_a, pairs[0].form_b);
    }

    #[test]
    fn pair_dump_round_trips() {
        let wl = parse_wordlist(SAMPLE).unwrap();
        let pairs = generate_pairs(&dedupe_synonyms(&wl, 3));
        let dump = render_pairs(&pairs);
        assert_eq!(parse_pairs(&dump).unwrap(), pairs);
    }

    #[test]
    fn pair_parse_rejects_bad_label() {
        let err = parse_pairs("1\tA\tB\twa\twb\t2\n").unwrap_err();
        assert_eq!(
            err,
            WordlistError::BadLabel {
                line: 1,
                value: "2".to_string()
            }
        );
    }

    fn synthetic_family(sizes: &[(&str, usize)]) -> WordList {
        let mut entries = Vec::new();
        let mut subfamilies = BTreeMap::new();
        let mut i = 0;
        for (name, size) in sizes {
            for _ in 0..*size {
                let language = format!("lang{i:02}");
                subfamilies.insert(language.clone(), name.to_string());
                entries.push(entry(1, &language, "w", 1));
                i += 1;
            }
        }
        let mut wl = WordList::new(entries);
        wl.set_subfamilies(subfamilies);
        wl
    }

    #[test]
    fn subfamily_split_reproduces_41_language_test_side() {
        // Small groups (9 + 8 + 8) merge into Others = 25.
        let wl = synthetic_family(&[
            ("Germanic", 14),
            ("Indo-Iranian", 18),
            ("Romance", 14),
            ("Slavic", 13),
            ("Celtic", 9),
            ("Baltic", 8),
            ("Albanian", 8),
        ]);
        let groups = wl.merged_subfamily_groups();
        assert_eq!(groups["Others"].len(), 25);
        assert_eq!(groups.len(), 5);

        let (train, test) = subfamily_split(&wl, 11).unwrap();
        assert_eq!(test.len(), 41);
        assert_eq!(train.len(), 43);
        assert!(train.is_disjoint(&test));
        let mut all = train.clone();
        all.extend(test.clone());
        assert_eq!(all.len(), 84);

        let (train2, test2) = subfamily_split(&wl, 11).unwrap();
        assert_eq!((train, test), (train2, test2));
    }

    #[test]
    fn subfamily_split_test_gets_extra_convention() {
        let wl = synthetic_family(&[("A", 13), ("B", 12)]);
        let (train, test) =
            subfamily_split_with(&wl, 0, SplitConvention::TestGetsExtra).unwrap();
        assert_eq!(train.len(), 6 + 6);
        assert_eq!(test.len(), 7 + 6);
    }

    #[test]
    fn subfamily_split_two_language_group() {
        let wl = synthetic_family(&[("A", 12), ("B", 2)]);
        // B has fewer than 10 languages, so it merges into Others (size 2).
        let (train, test) = subfamily_split(&wl, 5).unwrap();
        assert_eq!(train.len(), 7);
        assert_eq!(test.len(), 7);
    }

    #[test]
    fn subfamily_split_rejects_singleton_group() {
        let wl = synthetic_family(&[("A", 1)]);
        assert_eq!(
            subfamily_split(&wl, 0).unwrap_err(),
            WordlistError::UnsplittableSubfamily {
                name: DEFAULT_SUBFAMILY.to_string(),
                size: 1
            }
        );
    }

    fn n_pairs(n: usize) -> Vec<LabeledPair> {
        (0..n)
            .map(|i| LabeledPair {
                concept_id: i as u32,
                lang_a: "A".to_string(),
                lang_b: "B".to_string(),
                form_a: format!("wa{i}"),
                form_b: format!("wb{i}"),
                label: i % 2 == 0,
            })
            .collect()
    }

    #[test]
    fn kfold_even_and_uneven_sizes() {
        let folds = kfold_split(&n_pairs(10), 5, 0).unwrap();
        assert_eq!(folds.iter().map(Vec::len).collect::<Vec<_>>(), [2; 5]);

        let folds = kfold_split(&n_pairs(11), 5, 0).unwrap();
        assert_eq!(
            folds.iter().map(Vec::len).collect::<Vec<_>>(),
            [3, 2, 2, 2, 2]
        );
    }

    #[test]
    fn kfold_folds_partition_the_input() {
        let pairs = n_pairs(23);
        let folds = kfold_split(&pairs, 4, 9).unwrap();
        let mut recovered: Vec<LabeledPair> = folds.into_iter().flatten().collect();
        recovered.sort();
        let mut expected = pairs.clone();
        expected.sort();
        assert_eq!(recovered, expected);
        assert_eq!(kfold_split(&pairs, 4, 9).unwrap().len(), 4);
    }

    #[test]
    fn kfold_rejects_bad_k() {
        let pairs = n_pairs(3);
        assert!(matches!(
            kfold_split(&pairs, 4, 0),
            Err(WordlistError::BadFoldCount { len: 3, k: 4 })
        ));
        assert!(matches!(
            kfold_split(&pairs, 1, 0),
            Err(WordlistError::BadFoldCount { len: 3, k: 1 })
        ));
    }

    proptest! {
        #[test]
        fn pair_count_matches_brute_force(
            rows in proptest::collection::vec((1u32..4, 0usize..5, 1i64..4), 1..20)
        ) {
            let entries: Vec<WordEntry> = rows
                .iter()
                .enumerate()
                .map(|(i, &(concept, lang, ccn))| {
                    entry(concept, &format!("L{lang}"), &format!("w{i}"), ccn)
                })
                .collect();
            let deduped = dedupe_synonyms(&WordList::new(entries), 1);
            let pairs = generate_pairs(&deduped);

            let mut expected = 0usize;
            let es = deduped.entries();
            for i in 0..es.len() {
                for j in i + 1..es.len() {
                    if es[i].concept_id == es[j].concept_id
                        && es[i].language != es[j].language
                    {
                        expected += 1;
                    }
                }
            }
            prop_assert_eq!(pairs.len(), expected);
            prop_assert!(pairs.iter().all(|p| p.lang_a < p.lang_b));

            let mut sorted = pairs.clone();
            sorted.sort_by(|a, b| {
                (a.concept_id, &a.lang_a, &a.lang_b).cmp(&(b.concept_id, &b.lang_a, &b.lang_b))
            });
            prop_assert_eq!(&pairs, &sorted);
        }
    }
}

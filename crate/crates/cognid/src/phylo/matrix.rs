//! Symmetric language-by-language distance matrices derived from pairwise
//! cognacy judgments, plus a relaxed PHYLIP square text format for
//! interoperability with external tree tools.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::PhyloError;
use crate::scalar::{NeumaierSum, Scalar};

/// A symmetric distance matrix with a zero diagonal, indexed by label.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<F = f64> {
    labels: Vec<String>,
    values: Vec<F>,
}

impl<F: Scalar> DistanceMatrix<F> {
    /// Builds a matrix from row-major values, validating squareness, label
    /// uniqueness, a zero diagonal, symmetry, and finiteness. Every public
    /// constructor funnels through here, so downstream consumers can rely
    /// on those invariants.
    pub fn new(labels: Vec<String>, values: Vec<F>) -> Result<Self, PhyloError> {
        let l = labels.len();
        if values.len() != l * l {
            return Err(PhyloError::NotSquare {
                labels: l,
                values: values.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.clone()) {
                return Err(PhyloError::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        for i in 0..l {
            if values[i * l + i] != F::zero() {
                return Err(PhyloError::NonZeroDiagonal {
                    label: labels[i].clone(),
                });
            }
            for j in 0..l {
                let v = values[i * l + j];
                if !v.is_finite() {
                    return Err(PhyloError::NonFiniteDistance);
                }
                if j > i && v != values[j * l + i] {
                    return Err(PhyloError::NotSymmetric {
                        a: labels[i].clone(),
                        b: labels[j].clone(),
                    });
                }
            }
        }
        Ok(DistanceMatrix { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.values[i * self.len() + j]
    }

    /// Renders the matrix in relaxed PHYLIP square format: a count line,
    /// then one line per label with tab-separated label and space-separated
    /// distances at ten decimal places.
    pub fn to_phylip(&self) -> String {
        let l = self.len();
        let mut out = format!("{l}\n");
        for i in 0..l {
            let row: Vec<String> = (0..l)
                .map(|j| format!("{:.10}", self.get(i, j).to_f64().unwrap()))
                .collect();
            let _ = writeln!(out, "{}\t{}", self.labels[i], row.join(" "));
        }
        out
    }

    /// Parses the relaxed PHYLIP square format written by [`to_phylip`]:
    /// labels and values may be separated by any run of whitespace.
    ///
    /// [`to_phylip`]: DistanceMatrix::to_phylip
    pub fn parse_phylip(text: &str) -> Result<Self, PhyloError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (count_line, raw_count) = lines.next().ok_or(PhyloError::Phylip {
            line: 1,
            message: "empty input".to_string(),
        })?;
        let l: usize = raw_count.trim().parse().map_err(|_| PhyloError::Phylip {
            line: count_line + 1,
            message: format!("invalid taxon count {:?}", raw_count.trim()),
        })?;
        let mut labels = Vec::with_capacity(l);
        let mut values = Vec::with_capacity(l * l);
        for _ in 0..l {
            let (idx, line) = lines.next().ok_or(PhyloError::Phylip {
                line: count_line + 1,
                message: format!("expected {l} rows"),
            })?;
            let mut fields = line.split_whitespace();
            let label = fields.next().ok_or(PhyloError::Phylip {
                line: idx + 1,
                message: "missing label".to_string(),
            })?;
            labels.push(label.to_string());
            let row: Vec<&str> = fields.collect();
            if row.len() != l {
                return Err(PhyloError::Phylip {
                    line: idx + 1,
                    message: format!("expected {l} distances, found {}", row.len()),
                });
            }
            for field in row {
                let v: f64 = field.parse().map_err(|_| PhyloError::Phylip {
                    line: idx + 1,
                    message: format!("invalid distance {field:?}"),
                })?;
                values.push(F::from_f64(v).ok_or(PhyloError::NonFiniteDistance)?);
            }
        }
        if let Some((idx, _)) = lines.next() {
            return Err(PhyloError::Phylip {
                line: idx + 1,
                message: "trailing content after matrix rows".to_string(),
            });
        }
        DistanceMatrix::new(labels, values)
    }
}

/// Accumulates per-pair judgment counts keyed by unordered label pairs, then
/// checks that every pair of observed languages has at least one judgment.
fn assemble<F: Scalar>(
    counts: BTreeMap<(String, String), (F, u64)>,
) -> Result<DistanceMatrix<F>, PhyloError> {
    let mut labels = BTreeSet::new();
    for (a, b) in counts.keys() {
        labels.insert(a.clone());
        labels.insert(b.clone());
    }
    let labels: Vec<String> = labels.into_iter().collect();
    let l = labels.len();
    let mut missing = Vec::new();
    let mut values = vec![F::zero(); l * l];
    for i in 0..l {
        for j in i + 1..l {
            let key = (labels[i].clone(), labels[j].clone());
            match counts.get(&key) {
                Some(&(sum, n)) => {
                    let share = sum / F::from_u64(n).unwrap();
                    let d = F::one() - share;
                    values[i * l + j] = d;
                    values[j * l + i] = d;
                }
                None => missing.push(format!("{} / {}", labels[i], labels[j])),
            }
        }
    }
    if !missing.is_empty() {
        return Err(PhyloError::MissingPairs {
            missing: missing.join(", "),
        });
    }
    DistanceMatrix::new(labels, values)
}

fn ordered(a: &str, b: &str) -> Result<(String, String), PhyloError> {
    match a.cmp(b) {
        std::cmp::Ordering::Less => Ok((a.to_string(), b.to_string())),
        std::cmp::Ordering::Greater => Ok((b.to_string(), a.to_string())),
        std::cmp::Ordering::Equal => Err(PhyloError::SelfPair {
            language: a.to_string(),
        }),
    }
}

/// Distance from binary cognacy judgments: one minus the fraction of word
/// pairs of the two languages judged cognate. Labels come out sorted. Every
/// pair of observed languages needs at least one judgment; missing pairs are
/// reported together in the error.
pub fn binary_distance_matrix<F: Scalar>(
    judgments: &[(&str, &str, bool)],
) -> Result<DistanceMatrix<F>, PhyloError> {
    let mut counts: BTreeMap<(String, String), (F, u64)> = BTreeMap::new();
    for &(a, b, cognate) in judgments {
        let key = ordered(a, b)?;
        let entry = counts.entry(key).or_insert((F::zero(), 0));
        if cognate {
            entry.0 = entry.0 + F::one();
        }
        entry.1 += 1;
    }
    assemble(counts)
}

/// Distance from cognacy probabilities: one minus the mean probability over
/// the word pairs of the two languages. Probabilities outside `[0, 1]` are
/// rejected. The mean uses compensated summation so the result does not
/// depend on batching.
pub fn weighted_distance_matrix<F: Scalar>(
    judgments: &[(&str, &str, F)],
) -> Result<DistanceMatrix<F>, PhyloError> {
    let mut sums: BTreeMap<(String, String), (NeumaierSum<F>, u64)> = BTreeMap::new();
    for &(a, b, p) in judgments {
        if !(p >= F::zero() && p <= F::one()) {
            return Err(PhyloError::BadProbability {
                a: a.to_string(),
                b: b.to_string(),
                value: p.to_f64().unwrap_or(f64::NAN),
            });
        }
        let key = ordered(a, b)?;
        let entry = sums.entry(key).or_insert((NeumaierSum::new(), 0));
        entry.0.add(p);
        entry.1 += 1;
    }
    let counts: BTreeMap<(String, String), (F, u64)> = sums
        .into_iter()
        .map(|(key, (sum, n))| (key, (sum.total(), n)))
        .collect();
    assemble(counts)
}

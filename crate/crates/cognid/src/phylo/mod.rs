//! Phylogenetic inference and tree comparison: distance matrices built from
//! pairwise cognacy judgments, Neighbor-Joining, Newick serialization, and
//! quartet-based distances between (possibly multifurcating) trees.

mod matrix;
mod nj;
mod quartet;
mod tree;

pub use matrix::{binary_distance_matrix, weighted_distance_matrix, DistanceMatrix};
pub use nj::neighbor_joining;
pub use quartet::{count_butterflies, gqd, quartet_distance, quartet_tally, QuartetTally};
pub use tree::{parse_newick, write_newick, PhyloTree};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhyloError {
    #[error("distance matrix must be square: got {values} values for {labels} labels")]
    NotSquare { labels: usize, values: usize },
    #[error("distance matrix is not symmetric at ({a}, {b})")]
    NotSymmetric { a: String, b: String },
    #[error("distance matrix diagonal must be zero at {label}")]
    NonZeroDiagonal { label: String },
    #[error("distance matrix entries must be finite")]
    NonFiniteDistance,
    #[error("duplicate label {label:?}")]
    DuplicateLabel { label: String },
    #[error("no judgments for language pair(s): {missing}")]
    MissingPairs { missing: String },
    #[error("judgment pairs a language {language:?} with itself")]
    SelfPair { language: String },
    #[error("probability {value} for pair ({a}, {b}) is outside [0, 1]")]
    BadProbability { a: String, b: String, value: f64 },
    #[error("need at least {min} labels, got {found}")]
    TooFewLabels { found: usize, min: usize },
    #[error("need at least {min} leaves, got {found}")]
    TooFewLeaves { found: usize, min: usize },
    #[error("tree text error at byte {pos}: {message}")]
    Newick { pos: usize, message: String },
    #[error("duplicate leaf name {name:?}")]
    DuplicateLeaf { name: String },
    #[error("label {name:?} cannot be written in tree format")]
    BadLabel { name: String },
    #[error("tree has branches without lengths; path lengths are undefined")]
    MissingBranchLengths,
    #[error("leaf sets differ; only in first: [{only_first}]; only in second: [{only_second}]")]
    LeafSetMismatch {
        only_first: String,
        only_second: String,
    },
    #[error("the reference tree has no butterflies to compare against")]
    GoldUnresolved,
    #[error("matrix file error at line {line}: {message}")]
    Phylip { line: usize, message: String },
}

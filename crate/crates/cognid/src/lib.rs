//! Cognate identification and phylogenetic inference from multilingual word lists.
//!
//! The pipeline goes: parse a word list ([`wordlist`]), extract gap-weighted
//! subsequence features or classical string-similarity features for word pairs
//! ([`subseq`], [`strsim`]), train a linear classifier over the sparse feature
//! vectors ([`classifier`]), score the predictions ([`eval`]), and finally turn
//! pairwise cognacy judgments into language distance matrices and
//! Neighbor-Joining trees compared against a gold tree by quartet distances
//! ([`phylo`]).
//!
//! All numeric code is generic over a floating-point [`Scalar`] (`f32` or
//! `f64`); type aliases at the crate root fix the default `f64` precision.

pub mod classifier;
pub mod eval;
pub mod features;
pub mod phylo;
pub mod strsim;
pub mod subseq;
pub mod wordlist;

mod scalar;

pub use scalar::{NeumaierSum, Scalar};

/// Sparse feature vector at the default precision.
pub type SparseVector = features::SparseVector<f64>;
/// Per-word subsequence weight vector at the default precision.
pub type SubseqVector = subseq::SubseqVector<f64>;
/// Subsequence kernel parameters at the default precision.
pub type KernelParams = subseq::KernelParams<f64>;
/// Trained linear model at the default precision.
pub type LinearModel = classifier::LinearModel<f64>;
/// Pairwise language distance matrix at the default precision.
pub type DistanceMatrix = phylo::DistanceMatrix<f64>;
/// Phylogenetic tree with branch lengths at the default precision.
pub type PhyloTree = phylo::PhyloTree<f64>;

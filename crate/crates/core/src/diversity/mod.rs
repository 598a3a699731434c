//! How alike a population of algorithms is: Jaccard similarity of binary
//! predictions, utility-weighted similarity, and per-patient Fleiss' κ.

mod kappa;
mod matrix;
mod similarity;

use thiserror::Error;

use crate::data::CoverageError;

pub use kappa::{fleiss_kappa, kappa_distribution, Histogram, Kappa, KappaDistribution, DEFAULT_KAPPA_BINS};
pub use matrix::{
    concatenated_trace, unweighted_matrix, weighted_matrix, MatrixKind, Ranking, SimilarityMatrix,
    CONCATENATED, PAIRWISE,
};
pub use similarity::{unweighted_pair, unweighted_similarity, weighted_pair, weighted_similarity, PairScore};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiversityError {
    #[error("sequences differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least two raters, got {0}")]
    TooFewRaters(usize),
    #[error("need at least one subject")]
    NoSubjects,
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

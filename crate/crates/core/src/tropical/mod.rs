//! Exact min-plus linear algebra.

mod assignment;
mod barvinok;
mod determinant;
mod difference;
mod matrix;
mod rank;
mod value;

use thiserror::Error;

pub use assignment::{min_cost_assignment, Weight};
pub use barvinok::{barvinok_rank, trivial_factorization, BarvinokFactorization, BarvinokOptions, BarvinokRank};
pub use determinant::{is_nonsingular, tropical_determinant, AssignmentCertificate, CertificateReport};
pub use difference::DifferenceSystem;
pub use matrix::{min_plus_multiply, tropical_scale, SubmatrixWitness, TropicalMatrix};
pub use rank::{sample_minors, tropical_rank, MinorSample, RankOptions, TropicalRank};
pub use value::TropicalValue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropicalError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("rows have different lengths")]
    Ragged,
    #[error("cannot multiply {left:?} by {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("offset vectors do not match the matrix shape")]
    OffsetLength,
    #[error("minor size {k} out of range")]
    MinorSize { k: usize },
    #[error("entries too large for sampled minor checks")]
    NotMachineSized,
    #[error("search budget exhausted at level {level} after {examined} evaluations")]
    BudgetExhausted { level: usize, examined: u64, rank_at_least: Option<usize> },
    #[error("no factorization with k <= {kmax}")]
    BarvinokExceeds { kmax: usize },
}

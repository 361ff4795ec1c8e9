//! Lifts of tropical matrices to Puiseux series, and realizability of
//! point-line incidence patterns in the plane.

mod bounds;
mod lift;
mod pattern;
mod realize;
mod series;

pub use bounds::{kapranov_bounds, Bound, BoundSource, BoundsOptions, KapranovBounds};
pub use lift::{lift_from_configuration, series_rank, verify_lift, LiftMatrix, LiftVerdict, RejectReason, SeriesRank};
pub use pattern::{incidences_over_rationals, Configuration, IncidencePattern, Mismatch, MismatchKind};
pub use realize::{realize_guided, realize_rank3, RealizeField, RealizeOptions, RealizabilityVerdict};
pub use series::{BaseField, SeriesValuation, TruncatedSeries, Truncation};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("coefficient is not defined in the field")]
    NotInField,
    #[error("series over different fields")]
    FieldMismatch,
    #[error("negative exponent")]
    NegativeExponent,
    #[error("cannot parse series term `{0}`")]
    Parse(String),
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("entry ({row},{col}) does not share the matrix field and truncation")]
    NonUniformEntry { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("entry ({row},{col}) is negative")]
    NegativeEntry { row: usize, col: usize },
    #[error("column {column} has no pivot of determinate valuation at this truncation")]
    IndeterminateAtTruncation { column: usize },
    #[error("configuration does not realize the pattern at ({row},{col})")]
    Precondition { row: usize, col: usize },
    #[error("floating-point configurations cannot be lifted exactly")]
    InexactConfiguration,
    #[error("no generic perturbation found after {0} draws")]
    NoGenericDraw(usize),
    #[error("pattern entry ({row},{col}) is not 0 or 1")]
    NotZeroOne { row: usize, col: usize },
    #[error("zero vector for {0}")]
    ZeroVector(String),
}

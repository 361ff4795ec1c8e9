//! Small Galois fields and their projective planes.

mod field;
mod plane;

use thiserror::Error;

pub use field::{GaloisField, SUPPORTED_ORDERS};
pub use plane::{ProjectivePlane, WeightScheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("unsupported field order {0}")]
    UnsupportedOrder(u32),
    #[error("no irreducible modulus found for order {0}")]
    NoIrreducible(u32),
    #[error("plane axiom violated: {0}")]
    Axiom(String),
    #[error("incidence weights must be strictly positive")]
    NonPositiveWeight,
}

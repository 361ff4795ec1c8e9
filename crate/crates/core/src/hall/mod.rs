//! Reduction from polynomial systems to point-line incidence patterns
//! using coordinate gadgets in the plane.

mod compile;
mod gadget;
mod system;

pub use compile::{compile_system, reduce, verify_reduction, CompiledPattern, ReductionVerdict};
pub use gadget::{Construction, ElementId, ElementKind, Frame, GadgetProgram, Step};
pub use system::{cnf_to_polys, harden, Cnf, Hardening, PolySystem, VarKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HallError {
    #[error("equation {equation} uses undeclared variable {variable}")]
    UnknownVariable { equation: usize, variable: usize },
    #[error("equation {0} has a non-integer coefficient")]
    NonIntegerCoefficient(usize),
    #[error("expected {expected} values, found {found}")]
    AssignmentLength { expected: usize, found: usize },
    #[error("{0} free unknowns are too many to enumerate")]
    TooManyVariables(usize),
    #[error("literal {0} is out of range")]
    BadLiteral(i64),
    #[error("system already contains generic constants")]
    AlreadyHardened,
    #[error("equation {equation} has a monomial of degree {degree} in the unknowns")]
    DegreeTooHigh { equation: usize, degree: u32 },
    #[error("witnesses disagree on point {point} and line {line} three times")]
    WitnessDisagreement { point: String, line: String },
    #[error("{0} is not a point on y = x")]
    NotDiagonal(String),
    #[error("step {0} evaluates to the zero vector")]
    Degenerate(String),
}

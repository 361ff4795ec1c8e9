use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_rational::BigRational;

use crate::rational::{format_rational, int, parse_rational};

/// An element of the min-plus semiring: a finite exact rational or `∞`.
///
/// Ordering places every finite value below `∞`, so `min` is the semiring sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TropicalValue {
    Finite(BigRational),
    Infinity,
}

impl TropicalValue {
    pub fn zero() -> Self {
        TropicalValue::Finite(int(0))
    }

    pub fn int(v: i64) -> Self {
        TropicalValue::Finite(int(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TropicalValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            TropicalValue::Finite(v) => Some(v),
            TropicalValue::Infinity => None,
        }
    }

    /// Semiring addition.
    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "inf" | "+inf" | "Inf" | "∞" => Some(TropicalValue::Infinity),
            other => parse_rational(other).map(TropicalValue::Finite),
        }
    }
}

impl From<BigRational> for TropicalValue {
    fn from(v: BigRational) -> Self {
        TropicalValue::Finite(v)
    }
}

impl PartialOrd for TropicalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropicalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TropicalValue::Finite(a), TropicalValue::Finite(b)) => a.cmp(b),
            (TropicalValue::Finite(_), TropicalValue::Infinity) => Ordering::Less,
            (TropicalValue::Infinity, TropicalValue::Finite(_)) => Ordering::Greater,
            (TropicalValue::Infinity, TropicalValue::Infinity) => Ordering::Equal,
        }
    }
}

/// Semiring multiplication: ordinary addition with `∞` absorbing.
impl Add for &TropicalValue {
    type Output = TropicalValue;

    fn add(self, rhs: &TropicalValue) -> TropicalValue {
        match (self, rhs) {
            (TropicalValue::Finite(a), TropicalValue::Finite(b)) => TropicalValue::Finite(a + b),
            _ => TropicalValue::Infinity,
        }
    }
}

impl Add for TropicalValue {
    type Output = TropicalValue;

    fn add(self, rhs: TropicalValue) -> TropicalValue {
        &self + &rhs
    }
}

impl fmt::Display for TropicalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropicalValue::Finite(v) => f.write_str(&format_rational(v)),
            TropicalValue::Infinity => f.write_str("inf"),
        }
    }
}

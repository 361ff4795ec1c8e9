use serde::{Deserialize, Serialize};

use super::assignment::min_cost_assignment;
use super::{TropicalError, TropicalMatrix, TropicalValue};

/// Result of the tropical determinant: the minimum permutation sum, one
/// permutation attaining it, and whether it is the only one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentCertificate {
    pub value: TropicalValue,
    /// `witness[i]` is the column matched to row `i`; absent when the value is `∞`.
    pub witness: Option<Vec<usize>>,
    pub unique: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateReport {
    pub value: String,
    pub witness: Option<Vec<usize>>,
    pub unique: bool,
}

impl From<&AssignmentCertificate> for CertificateReport {
    fn from(c: &AssignmentCertificate) -> Self {
        CertificateReport {
            value: c.value.to_string(),
            witness: c.witness.clone(),
            unique: c.unique,
        }
    }
}

/// Minimum over permutations π of Σ m[i][π(i)], certified unique or not.
///
/// Uniqueness is decided by re-solving the assignment problem once per edge
/// of the witness with that edge forbidden: any other optimal permutation
/// avoids at least one witness edge, so it shows up in one of the re-solves.
pub fn tropical_determinant(m: &TropicalMatrix) -> Result<AssignmentCertificate, TropicalError> {
    if !m.is_square() {
        return Err(TropicalError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let cost = |i: usize, j: usize| m.get(i, j).finite().cloned();
    let Some((value, witness)) = min_cost_assignment(n, cost) else {
        return Ok(AssignmentCertificate {
            value: TropicalValue::Infinity,
            witness: None,
            unique: false,
        });
    };
    let mut unique = true;
    for (row, &col) in witness.iter().enumerate() {
        let forbidden = |i: usize, j: usize| {
            if i == row && j == col {
                None
            } else {
                m.get(i, j).finite().cloned()
            }
        };
        if let Some((alt, _)) = min_cost_assignment(n, forbidden) {
            if alt == value {
                unique = false;
                break;
            }
        }
    }
    Ok(AssignmentCertificate {
        value: TropicalValue::Finite(value),
        witness: Some(witness),
        unique,
    })
}

pub fn is_nonsingular(m: &TropicalMatrix) -> Result<bool, TropicalError> {
    tropical_determinant(m).map(|c| c.unique)
}

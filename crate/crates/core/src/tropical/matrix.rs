use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{TropicalError, TropicalValue};

/// A dense `rows × cols` matrix over the min-plus semiring, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropicalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TropicalValue>,
}

impl TropicalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TropicalValue>) -> Result<Self, TropicalError> {
        if rows == 0 || cols == 0 {
            return Err(TropicalError::Empty);
        }
        if entries.len() != rows * cols {
            return Err(TropicalError::EntryCount {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(TropicalMatrix { rows, cols, entries })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> TropicalValue,
    ) -> Result<Self, TropicalError> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    /// Builds from integer rows where `None` stands for `∞`.
    pub fn from_rows(rows: &[Vec<Option<i64>>]) -> Result<Self, TropicalError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(TropicalError::Ragged);
        }
        Self::from_fn(rows.len(), cols, |i, j| match rows[i][j] {
            Some(v) => TropicalValue::int(v),
            None => TropicalValue::Infinity,
        })
    }

    /// Builds from integer rows with no infinite entries.
    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self, TropicalError> {
        let rows: Vec<Vec<Option<i64>>> =
            rows.iter().map(|r| r.iter().copied().map(Some).collect()).collect();
        Self::from_rows(&rows)
    }

    /// The min-plus identity: 0 on the diagonal, `∞` elsewhere.
    pub fn identity(n: usize) -> Result<Self, TropicalError> {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                TropicalValue::zero()
            } else {
                TropicalValue::Infinity
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TropicalValue {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[TropicalValue] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[TropicalValue] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
            .expect("transpose keeps a valid shape")
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self, TropicalError> {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// True when every entry is 0 or 1.
    pub fn is_zero_one(&self) -> bool {
        let zero = TropicalValue::int(0);
        let one = TropicalValue::int(1);
        self.entries.iter().all(|v| *v == zero || *v == one)
    }

    pub fn finite_entries(&self) -> impl Iterator<Item = &BigRational> {
        self.entries.iter().filter_map(TropicalValue::finite)
    }
}

impl fmt::Display for TropicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Row/column index sets selecting a square submatrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmatrixWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// `C[i][j] = min_s (A[i][s] + B[s][j])`.
pub fn min_plus_multiply(a: &TropicalMatrix, b: &TropicalMatrix) -> Result<TropicalMatrix, TropicalError> {
    if a.cols != b.rows {
        return Err(TropicalError::DimensionMismatch {
            left: (a.rows, a.cols),
            right: (b.rows, b.cols),
        });
    }
    TropicalMatrix::from_fn(a.rows, b.cols, |i, j| {
        (0..a.cols)
            .map(|s| a.get(i, s) + b.get(s, j))
            .min()
            .unwrap_or(TropicalValue::Infinity)
    })
}

/// `M'[i][j] = M[i][j] + r[i] + c[j]`, leaving `∞` entries alone.
pub fn tropical_scale(
    m: &TropicalMatrix,
    row_offsets: &[BigRational],
    col_offsets: &[BigRational],
) -> Result<TropicalMatrix, TropicalError> {
    if row_offsets.len() != m.rows || col_offsets.len() != m.cols {
        return Err(TropicalError::OffsetLength);
    }
    TropicalMatrix::from_fn(m.rows, m.cols, |i, j| match m.get(i, j) {
        TropicalValue::Finite(v) => TropicalValue::Finite(v + &row_offsets[i] + &col_offsets[j]),
        TropicalValue::Infinity => TropicalValue::Infinity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn m(rows: &[Vec<Option<i64>>]) -> TropicalMatrix {
        TropicalMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let a = m(&[vec![Some(3), None, Some(-1)], vec![Some(0), Some(2), Some(5)]]);
        let left = TropicalMatrix::identity(2).unwrap();
        let right = TropicalMatrix::identity(3).unwrap();
        assert_eq!(min_plus_multiply(&left, &a).unwrap(), a);
        assert_eq!(min_plus_multiply(&a, &right).unwrap(), a);
    }

    #[test]
    fn outer_sum() {
        let col = m(&[vec![Some(0)], vec![Some(1)]]);
        let row = m(&[vec![Some(0), Some(1)]]);
        let expected = m(&[vec![Some(0), Some(1)], vec![Some(1), Some(2)]]);
        assert_eq!(min_plus_multiply(&col, &row).unwrap(), expected);
    }

    #[test]
    fn identity_times_matrix() {
        let e = m(&[vec![Some(0), None], vec![None, Some(0)]]);
        let b = m(&[vec![Some(1), Some(2)], vec![Some(3), Some(4)]]);
        assert_eq!(min_plus_multiply(&e, &b).unwrap(), b);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = m(&[vec![Some(0), Some(1)]]);
        assert!(matches!(
            min_plus_multiply(&a, &a),
            Err(TropicalError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scale_examples() {
        let a = m(&[vec![Some(0), Some(1)], vec![Some(1), Some(0)]]);
        let zeros = vec![int(0), int(0)];
        assert_eq!(tropical_scale(&a, &zeros, &zeros).unwrap(), a);
        let scaled = tropical_scale(&a, &[int(1), int(0)], &zeros).unwrap();
        assert_eq!(scaled, m(&[vec![Some(1), Some(2)], vec![Some(1), Some(0)]]));
    }

    #[test]
    fn shape_validation() {
        assert!(TropicalMatrix::new(0, 1, vec![]).is_err());
        assert!(TropicalMatrix::new(2, 2, vec![TropicalValue::zero()]).is_err());
    }
}

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BaseField, Configuration, IncidencePattern, LiftError, SeriesValuation, TruncatedSeries, Truncation};
use crate::rational::int;
use crate::tropical::{TropicalMatrix, TropicalValue};

/// A matrix of truncated series sharing one field and one truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftMatrix {
    rows: usize,
    cols: usize,
    field: BaseField,
    truncation: Truncation,
    entries: Vec<TruncatedSeries>,
}

impl LiftMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        field: BaseField,
        truncation: Truncation,
        entries: Vec<TruncatedSeries>,
    ) -> Result<Self, LiftError> {
        if entries.len() != rows * cols {
            return Err(LiftError::EntryCount { expected: rows * cols, found: entries.len() });
        }
        for (k, e) in entries.iter().enumerate() {
            if e.field() != field || e.truncation() != &truncation {
                return Err(LiftError::NonUniformEntry { row: k / cols.max(1), col: k % cols.max(1) });
            }
        }
        Ok(LiftMatrix { rows, cols, field, truncation, entries })
    }

    /// Parses each entry with [`TruncatedSeries::parse`].
    pub fn from_text(
        rows: usize,
        cols: usize,
        field: BaseField,
        truncation: Truncation,
        cells: &[&str],
    ) -> Result<Self, LiftError> {
        let entries = cells
            .iter()
            .map(|c| TruncatedSeries::parse(c, field, truncation.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows, cols, field, truncation, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.cols + j]
    }

    /// Entrywise valuations, with truncated zeros reported separately.
    pub fn valuations(&self) -> Vec<SeriesValuation> {
        self.entries.iter().map(TruncatedSeries::valuation).collect()
    }
}

impl fmt::Display for LiftMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                writeln!(f, "{i} {j} : {}", self.get(i, j).to_text())?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRank {
    pub rank: usize,
    /// Some pivot was chosen while a truncated zero of possibly smaller
    /// valuation sat in the same column.
    pub precision_limited: bool,
}

/// Rank over the series field by fraction-free elimination. Pivots are
/// entries of minimal valuation. Fails when a column retains only entries
/// that are zero up to the truncation.
pub fn series_rank(l: &LiftMatrix) -> Result<SeriesRank, LiftError> {
    let mut work: Vec<Vec<TruncatedSeries>> = (0..l.rows).map(|i| (0..l.cols).map(|j| l.get(i, j).clone()).collect()).collect();
    let mut rank = 0;
    let mut precision_limited = false;
    for col in 0..l.cols {
        if rank == l.rows {
            break;
        }
        let mut pivot: Option<(usize, BigRational)> = None;
        let mut undetermined: Option<BigRational> = None;
        for (r, row) in work.iter().enumerate().skip(rank) {
            match row[col].valuation() {
                SeriesValuation::Value(v) => {
                    if pivot.as_ref().is_none_or(|(_, best)| v < *best) {
                        pivot = Some((r, v));
                    }
                }
                SeriesValuation::AtLeast(o) => {
                    if undetermined.as_ref().is_none_or(|u| o < *u) {
                        undetermined = Some(o);
                    }
                }
                SeriesValuation::Infinite => {}
            }
        }
        let Some((p, pv)) = pivot else {
            if undetermined.is_some() {
                return Err(LiftError::IndeterminateAtTruncation { column: col });
            }
            continue;
        };
        if undetermined.is_some_and(|u| u < pv) {
            precision_limited = true;
        }
        work.swap(rank, p);
        let pivot_row = work[rank].clone();
        let pivot_entry = pivot_row[col].clone();
        for row in work.iter_mut().skip(rank + 1) {
            let factor = row[col].clone();
            if factor.is_exact_zero() {
                continue;
            }
            for c in col..l.cols {
                row[c] = pivot_entry.mul(&row[c])?.sub(&factor.mul(&pivot_row[c])?)?;
            }
            row[col] = TruncatedSeries::zero(l.field, Truncation::Exact);
        }
        rank += 1;
    }
    Ok(SeriesRank { rank, precision_limited })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    ValuationMismatch { row: usize, col: usize, expected: TropicalValue, found: SeriesValuation },
    RankExceeds { rank: usize, bound: usize },
    /// The rank could not be decided at the lift's truncation order.
    Indeterminate { column: usize },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::ValuationMismatch { row, col, expected, found } => {
                let found = match found {
                    SeriesValuation::Value(v) => TropicalValue::Finite(v.clone()).to_string(),
                    SeriesValuation::AtLeast(o) => format!(">= {}", TropicalValue::Finite(o.clone())),
                    SeriesValuation::Infinite => "inf".to_string(),
                };
                write!(f, "entry ({row},{col}) has valuation {found}, expected {expected}")
            }
            RejectReason::RankExceeds { rank, bound } => write!(f, "lift has rank {rank} > {bound}"),
            RejectReason::Indeterminate { column } => {
                write!(f, "rank undecided: column {column} is zero only up to the truncation")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftVerdict {
    Accepted {
        rank: usize,
        /// Some valuation was only confirmed up to the truncation order.
        truncation_limited: bool,
        precision_limited: bool,
    },
    Rejected(RejectReason),
}

impl LiftVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, LiftVerdict::Accepted { .. })
    }
}

/// Accepts iff every entry of `l` has valuation `m[i][j]` (∞ meaning the
/// zero series) and `l` has rank at most `r`.
pub fn verify_lift(m: &TropicalMatrix, l: &LiftMatrix, r: usize) -> Result<LiftVerdict, LiftError> {
    if m.rows() != l.rows || m.cols() != l.cols {
        return Err(LiftError::DimensionMismatch(format!(
            "matrix is {}x{}, lift is {}x{}",
            m.rows(),
            m.cols(),
            l.rows,
            l.cols
        )));
    }
    let mut truncation_limited = false;
    for i in 0..l.rows {
        for j in 0..l.cols {
            let expected = m.get(i, j);
            if let TropicalValue::Finite(v) = expected {
                if v.is_negative() {
                    return Err(LiftError::NegativeEntry { row: i, col: j });
                }
            }
            let found = l.get(i, j).valuation();
            let ok = match (&found, expected) {
                (SeriesValuation::Value(a), TropicalValue::Finite(b)) => a == b,
                (SeriesValuation::Infinite, TropicalValue::Infinity) => true,
                (SeriesValuation::AtLeast(_), TropicalValue::Infinity) => {
                    truncation_limited = true;
                    true
                }
                (SeriesValuation::AtLeast(o), TropicalValue::Finite(b)) if b >= o => {
                    truncation_limited = true;
                    true
                }
                _ => false,
            };
            if !ok {
                return Ok(LiftVerdict::Rejected(RejectReason::ValuationMismatch {
                    row: i,
                    col: j,
                    expected: expected.clone(),
                    found,
                }));
            }
        }
    }
    let SeriesRank { rank, precision_limited } = match series_rank(l) {
        Ok(r) => r,
        Err(LiftError::IndeterminateAtTruncation { column }) => {
            return Ok(LiftVerdict::Rejected(RejectReason::Indeterminate { column }))
        }
        Err(e) => return Err(e),
    };
    if rank > r {
        return Ok(LiftVerdict::Rejected(RejectReason::RankExceeds { rank, bound: r }));
    }
    Ok(LiftVerdict::Accepted { rank, truncation_limited, precision_limited })
}

const LIFT_DRAWS: usize = 64;

/// Lifts a realized pattern to a rank-≤3 matrix whose valuations are the
/// pattern: `L_ij = (v_i + t g_i)·(w_j + t h_j)` with small random integer
/// vectors `g`, `h`, re-drawn until every incidence gets a nonzero `t`
/// coefficient. Points and lines without incidences are not perturbed.
/// Entries are exact polynomials in `t`.
pub fn lift_from_configuration(
    pattern: &IncidencePattern,
    config: &Configuration,
    seed: u64,
) -> Result<LiftMatrix, LiftError> {
    let Configuration::Exact { field, points, lines } = config else {
        return Err(LiftError::InexactConfiguration);
    };
    let field = *field;
    if points.len() != pattern.rows() || lines.len() != pattern.cols() {
        return Err(LiftError::DimensionMismatch(format!(
            "pattern is {}x{}, configuration has {} points and {} lines",
            pattern.rows(),
            pattern.cols(),
            points.len(),
            lines.len()
        )));
    }
    let norm = |x: &BigRational| field.normalize(x);
    let dot = |a: &[BigRational; 3], b: &[BigRational; 3]| -> Result<BigRational, LiftError> {
        norm(&(0..3).map(|k| &a[k] * &b[k]).sum::<BigRational>())
    };
    for i in 0..pattern.rows() {
        for j in 0..pattern.cols() {
            if pattern.get(i, j) != dot(&points[i], &lines[j])?.is_zero() {
                return Err(LiftError::Precondition { row: i, col: j });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |active: &[bool]| -> Vec<[BigRational; 3]> {
        active
            .iter()
            .map(|&a| std::array::from_fn(|_| if a { int(rng.gen_range(-9..=9)) } else { int(0) }))
            .collect()
    };
    let point_active: Vec<bool> = (0..pattern.rows()).map(|i| !pattern.row_ones(i).is_empty()).collect();
    let line_active: Vec<bool> = (0..pattern.cols()).map(|j| !pattern.col_ones(j).is_empty()).collect();
    for _ in 0..LIFT_DRAWS {
        let g = draw(&point_active);
        let h = draw(&line_active);
        let mut entries = Vec::with_capacity(pattern.rows() * pattern.cols());
        let mut generic = true;
        'cells: for i in 0..pattern.rows() {
            for j in 0..pattern.cols() {
                let c0 = dot(&points[i], &lines[j])?;
                let c1 = norm(&(dot(&points[i], &h[j])? + dot(&g[i], &lines[j])?))?;
                let c2 = dot(&g[i], &h[j])?;
                if pattern.get(i, j) && c1.is_zero() {
                    generic = false;
                    break 'cells;
                }
                entries.push(TruncatedSeries::new(field, [(int(0), c0), (int(1), c1), (int(2), c2)], Truncation::Exact)?);
            }
        }
        if generic {
            return LiftMatrix::new(pattern.rows(), pattern.cols(), field, Truncation::Exact, entries);
        }
    }
    Err(LiftError::NoGenericDraw(LIFT_DRAWS))
}

//! Point-line incidence patterns and their candidate realizations.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::series::{mod_inverse, mul_mod};
use super::{BaseField, LiftError};
use crate::rational::modulo;
use crate::tropical::{TropicalMatrix, TropicalValue};

/// Relative tolerance for a floating-point incidence.
pub const FLOAT_INCIDENCE_TOL: f64 = 1e-9;
/// Minimal |cos| between a point and a line that must not meet.
pub const FLOAT_SEPARATION: f64 = 1e-4;

/// A (0,1) matrix read as points (rows) and lines (columns); a one marks
/// an incidence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IncidencePattern {
    rows: usize,
    cols: usize,
    ones: Vec<bool>,
}

impl IncidencePattern {
    pub fn new(rows: usize, cols: usize, ones: Vec<bool>) -> Result<Self, LiftError> {
        if ones.len() != rows * cols {
            return Err(LiftError::EntryCount { expected: rows * cols, found: ones.len() });
        }
        if rows == 0 || cols == 0 {
            return Err(LiftError::DimensionMismatch("empty pattern".to_string()));
        }
        Ok(IncidencePattern { rows, cols, ones })
    }

    /// Panics if either dimension is zero.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        assert!(rows > 0 && cols > 0, "empty pattern");
        let ones = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        IncidencePattern { rows, cols, ones }
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j] == 1)
    }

    pub fn from_matrix(m: &TropicalMatrix) -> Result<Self, LiftError> {
        let mut ones = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                match m.get(i, j) {
                    TropicalValue::Finite(v) if v.is_zero() => ones.push(false),
                    TropicalValue::Finite(v) if v.is_one() => ones.push(true),
                    _ => return Err(LiftError::NotZeroOne { row: i, col: j }),
                }
            }
        }
        Ok(IncidencePattern { rows: m.rows(), cols: m.cols(), ones })
    }

    pub fn to_matrix(&self) -> TropicalMatrix {
        TropicalMatrix::from_fn(self.rows, self.cols, |i, j| TropicalValue::int(self.get(i, j) as i64))
            .expect("patterns are nonempty")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.ones[i * self.cols + j]
    }

    pub fn row_ones(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(i, j)).collect()
    }

    pub fn col_ones(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn count_ones(&self) -> usize {
        self.ones.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for IncidencePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<&str> = (0..self.cols).map(|j| if self.get(i, j) { "1" } else { "0" }).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Homogeneous coordinates for points and lines; a point lies on a line
/// when their dot product vanishes.
#[derive(Clone, Debug, PartialEq)]
pub enum Configuration {
    Exact { field: BaseField, points: Vec<[BigRational; 3]>, lines: Vec<[BigRational; 3]> },
    Float { points: Vec<[f64; 3]>, lines: Vec<[f64; 3]> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MismatchKind {
    MissingIncidence,
    ExtraIncidence,
    ZeroPoint,
    ZeroLine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub row: usize,
    pub col: usize,
    pub kind: MismatchKind,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MismatchKind::MissingIncidence => write!(f, "point {} should lie on line {}", self.row, self.col),
            MismatchKind::ExtraIncidence => write!(f, "point {} should not lie on line {}", self.row, self.col),
            MismatchKind::ZeroPoint => write!(f, "point {} is the zero vector", self.row),
            MismatchKind::ZeroLine => write!(f, "line {} is the zero vector", self.col),
        }
    }
}

impl Configuration {
    pub fn point_count(&self) -> usize {
        match self {
            Configuration::Exact { points, .. } => points.len(),
            Configuration::Float { points, .. } => points.len(),
        }
    }

    pub fn line_count(&self) -> usize {
        match self {
            Configuration::Exact { lines, .. } => lines.len(),
            Configuration::Float { lines, .. } => lines.len(),
        }
    }

    /// `q`, `gfP` or `float`.
    pub fn field_tag(&self) -> String {
        match self {
            Configuration::Exact { field, .. } => field.tag(),
            Configuration::Float { .. } => "float".to_string(),
        }
    }

    /// Checks that the incidences are exactly the ones of `pattern`
    /// (within tolerance for floating-point coordinates).
    pub fn verify(&self, pattern: &IncidencePattern) -> Result<(), Mismatch> {
        if self.point_count() != pattern.rows() || self.line_count() != pattern.cols() {
            let kind = if self.point_count() != pattern.rows() { MismatchKind::ZeroPoint } else { MismatchKind::ZeroLine };
            return Err(Mismatch { row: self.point_count().min(pattern.rows()), col: self.line_count().min(pattern.cols()), kind });
        }
        let actual = match self.incidences() {
            Ok(sets) => sets,
            Err(e) => return Err(e),
        };
        for (i, on) in actual.iter().enumerate() {
            let mut k = 0;
            for j in 0..pattern.cols() {
                let is_on = k < on.len() && on[k] == j;
                if is_on {
                    k += 1;
                }
                match (pattern.get(i, j), is_on) {
                    (true, false) => return Err(Mismatch { row: i, col: j, kind: MismatchKind::MissingIncidence }),
                    (false, true) => return Err(Mismatch { row: i, col: j, kind: MismatchKind::ExtraIncidence }),
                    _ => {}
                }
            }
        }
        if let Configuration::Float { points, lines } = self {
            for (i, p) in points.iter().enumerate() {
                for (j, l) in lines.iter().enumerate() {
                    if !pattern.get(i, j) && float_cos(p, l).abs() < FLOAT_SEPARATION {
                        return Err(Mismatch { row: i, col: j, kind: MismatchKind::ExtraIncidence });
                    }
                }
            }
        }
        Ok(())
    }

    /// For each point, the sorted indices of the lines through it. Floating
    /// coordinates count as incident when |cos| is within tolerance.
    pub fn incidences(&self) -> Result<Vec<Vec<usize>>, Mismatch> {
        match self {
            Configuration::Exact { field: BaseField::Rational, points, lines } => incidences_over_rationals(points, lines),
            Configuration::Exact { field: BaseField::Prime(p), points, lines } => {
                let reduce = |v: &[BigRational; 3]| -> [u64; 3] {
                    std::array::from_fn(|k| {
                        let num = modulo(v[k].numer(), *p);
                        let den = modulo(v[k].denom(), *p);
                        let inv = mod_inverse(den, *p).unwrap_or(0);
                        ((num as u128 * inv as u128) % *p as u128) as u64
                    })
                };
                let pts: Vec<[u64; 3]> = points.iter().map(reduce).collect();
                let lns: Vec<[u64; 3]> = lines.iter().map(reduce).collect();
                check_nonzero(&pts, &lns, |v| v.iter().all(|&c| c == 0))?;
                Ok(pts
                    .iter()
                    .map(|a| {
                        (0..lns.len())
                            .filter(|&j| {
                                let b = &lns[j];
                                (0..3).map(|k| a[k] as u128 * b[k] as u128).sum::<u128>() % *p as u128 == 0
                            })
                            .collect()
                    })
                    .collect())
            }
            Configuration::Float { points, lines } => {
                check_nonzero(points, lines, |v| v.iter().all(|&c| c == 0.0 || !c.is_finite()))?;
                Ok(points
                    .iter()
                    .map(|a| (0..lines.len()).filter(|&j| float_cos(a, &lines[j]).abs() <= FLOAT_INCIDENCE_TOL).collect())
                    .collect())
            }
        }
    }
}

fn check_nonzero<T>(points: &[T], lines: &[T], is_zero: impl Fn(&T) -> bool) -> Result<(), Mismatch> {
    if let Some(i) = points.iter().position(&is_zero) {
        return Err(Mismatch { row: i, col: 0, kind: MismatchKind::ZeroPoint });
    }
    if let Some(j) = lines.iter().position(&is_zero) {
        return Err(Mismatch { row: 0, col: j, kind: MismatchKind::ZeroLine });
    }
    Ok(())
}

pub(crate) fn float_cos(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    dot / (na * nb)
}

fn scaled_by_first_nonzero<const N: usize>(v: [&BigRational; N]) -> Option<[BigRational; N]> {
    let lead = v.iter().find(|c| !c.is_zero())?;
    let inv = BigRational::one() / *lead;
    Some(std::array::from_fn(|k| v[k] * &inv))
}

/// Exact incidences over ℚ without comparing every pair: lines are
/// bucketed by direction and offset, so each point does one lookup per
/// direction class.
pub fn incidences_over_rationals(
    points: &[[BigRational; 3]],
    lines: &[[BigRational; 3]],
) -> Result<Vec<Vec<usize>>, Mismatch> {
    let is_zero = |v: &[BigRational; 3]| v.iter().all(|c| c.is_zero());
    check_nonzero(points, lines, is_zero)?;
    if let Some(out) = incidences_by_fingerprint(points, lines) {
        return Ok(out);
    }
    let mut at_infinity = Vec::new();
    let mut through_origin: HashMap<[BigRational; 2], Vec<usize>> = HashMap::new();
    let mut affine: HashMap<[BigRational; 2], HashMap<BigRational, Vec<usize>>> = HashMap::new();
    for (j, l) in lines.iter().enumerate() {
        match scaled_by_first_nonzero([&l[0], &l[1]]) {
            None => at_infinity.push(j),
            Some(dir) if l[2].is_zero() => through_origin.entry(dir).or_default().push(j),
            Some(dir) => {
                let lead = if l[0].is_zero() { &l[1] } else { &l[0] };
                let c = &l[2] / lead;
                affine.entry(dir).or_default().entry(c).or_default().push(j);
            }
        }
    }
    let mut classes: Vec<(&[BigRational; 2], &HashMap<BigRational, Vec<usize>>)> = affine.iter().collect();
    classes.sort_by(|a, b| a.0.cmp(b.0));
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let mut on: Vec<usize> = Vec::new();
        if p[2].is_zero() {
            on.extend(&at_infinity);
        }
        if p[0].is_zero() && p[1].is_zero() {
            on.extend(through_origin.values().flatten());
        } else if let Some(dir) = scaled_by_first_nonzero([&p[1], &(-&p[0])]) {
            if let Some(ls) = through_origin.get(&dir) {
                on.extend(ls);
            }
        }
        for (dir, offsets) in &classes {
            let s = &dir[0] * &p[0] + &dir[1] * &p[1];
            if p[2].is_zero() {
                if s.is_zero() {
                    on.extend(offsets.values().flatten());
                }
            } else if let Some(ls) = offsets.get(&(-s / &p[2])) {
                on.extend(ls);
            }
        }
        on.sort_unstable();
        out.push(on);
    }
    Ok(out)
}

fn exact_dot_is_zero(a: &[BigRational; 3], b: &[BigRational; 3]) -> bool {
    if a.iter().chain(b).all(|c| c.is_integer()) {
        let n = |v: &BigRational| v.numer().clone();
        return (n(&a[0]) * b[0].numer() + n(&a[1]) * b[1].numer() + n(&a[2]) * b[2].numer()).is_zero();
    }
    (&a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]).is_zero()
}

/// 2⁶¹ − 1.
const FINGERPRINT_PRIME: u64 = (1 << 61) - 1;

fn fingerprint(v: &[BigRational; 3]) -> Option<[u64; 3]> {
    let p = FINGERPRINT_PRIME;
    let mut out = [0; 3];
    for k in 0..3 {
        let num = modulo(v[k].numer(), p);
        out[k] = if v[k].is_integer() { num } else { mul_mod(num, mod_inverse(modulo(v[k].denom(), p), p)?, p) };
    }
    if out == [0; 3] {
        return None;
    }
    Some(out)
}

/// The same bucketing modulo a large prime, which is cheap for huge
/// coordinates; every incidence over ℚ is one mod p, so each candidate is
/// then confirmed exactly. `None` when some vector has no usable residue.
fn incidences_by_fingerprint(points: &[[BigRational; 3]], lines: &[[BigRational; 3]]) -> Option<Vec<Vec<usize>>> {
    let p = FINGERPRINT_PRIME;
    let div = |a: u64, b: u64| mul_mod(a, mod_inverse(b, p).expect("nonzero"), p);
    let neg = |a: u64| (p - a) % p;
    let add = |a: u64, b: u64| (a + b) % p;
    let pts: Vec<[u64; 3]> = points.iter().map(fingerprint).collect::<Option<_>>()?;
    let lns: Vec<[u64; 3]> = lines.iter().map(fingerprint).collect::<Option<_>>()?;
    let mut at_infinity = Vec::new();
    let mut through_origin: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut x_axis = Vec::new();
    let mut affine: HashMap<[u64; 2], HashMap<u64, Vec<usize>>> = HashMap::new();
    for (j, l) in lns.iter().enumerate() {
        if l[0] == 0 && l[1] == 0 {
            at_infinity.push(j);
            continue;
        }
        let lead = if l[0] == 0 { l[1] } else { l[0] };
        let dir = [div(l[0], lead), div(l[1], lead)];
        if l[2] == 0 {
            // direction (1, m) keyed by m; (0, 1) separately
            if dir[0] == 0 {
                x_axis.push(j);
            } else {
                through_origin.entry(dir[1]).or_default().push(j);
            }
        } else {
            affine.entry(dir).or_default().entry(div(l[2], lead)).or_default().push(j);
        }
    }
    let mut classes: Vec<(&[u64; 2], &HashMap<u64, Vec<usize>>)> = affine.iter().collect();
    classes.sort_by_key(|c| *c.0);
    let mut out = Vec::with_capacity(points.len());
    for (i, q) in pts.iter().enumerate() {
        let mut candidates: Vec<usize> = Vec::new();
        if q[2] == 0 {
            candidates.extend(&at_infinity);
        }
        if q[0] == 0 && q[1] == 0 {
            candidates.extend(through_origin.values().flatten());
            candidates.extend(&x_axis);
        } else if q[1] == 0 {
            candidates.extend(&x_axis);
        } else if let Some(ls) = through_origin.get(&neg(div(q[0], q[1]))) {
            // x + m·y = 0
            candidates.extend(ls);
        }
        for (dir, offsets) in &classes {
            let s = add(mul_mod(dir[0], q[0], p), mul_mod(dir[1], q[1], p));
            if q[2] == 0 {
                if s == 0 {
                    candidates.extend(offsets.values().flatten());
                }
            } else if let Some(ls) = offsets.get(&neg(div(s, q[2]))) {
                candidates.extend(ls);
            }
        }
        let a = &points[i];
        let mut on: Vec<usize> = candidates
            .into_iter()
            .filter(|&j| exact_dot_is_zero(a, &lines[j]))
            .collect();
        on.sort_unstable();
        out.push(on);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ProjectivePlane, WeightScheme};
    use crate::rational::int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(a: i64, b: i64, c: i64) -> [BigRational; 3] {
        [int(a), int(b), int(c)]
    }

    #[test]
    fn bucketed_incidences_match_pairwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut draw = |n: usize| -> Vec<[BigRational; 3]> {
                (0..n)
                    .map(|_| loop {
                        let w = v(rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-1..=1));
                        if w.iter().any(|c| !c.is_zero()) {
                            break w;
                        }
                    })
                    .collect()
            };
            let points = draw(12);
            let lines = draw(9);
            let fast = incidences_over_rationals(&points, &lines).unwrap();
            for (i, p) in points.iter().enumerate() {
                let slow: Vec<usize> = (0..lines.len())
                    .filter(|&j| (0..3).map(|k| &p[k] * &lines[j][k]).sum::<BigRational>().is_zero())
                    .collect();
                assert_eq!(fast[i], slow);
            }
        }
    }

    #[test]
    fn residue_collisions_are_confirmed_exactly() {
        let big = BigRational::from_integer(num_bigint::BigInt::from(FINGERPRINT_PRIME));
        // y = 1 + p agrees with y = 1 modulo p
        let points = vec![[int(0), &big + int(1), int(1)], [int(5), int(1), int(1)]];
        let lines = vec![v(0, 1, -1)];
        assert_eq!(incidences_over_rationals(&points, &lines).unwrap(), vec![vec![], vec![0]]);
        // a denominator divisible by p takes the exact path
        let points = vec![[int(1) / &big, int(1), int(1)]];
        assert_eq!(incidences_over_rationals(&points, &lines).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn fano_over_gf2() {
        let plane = ProjectivePlane::new(2).unwrap();
        let pattern = IncidencePattern::from_matrix(&plane.incidence_matrix(WeightScheme::Unit).unwrap()).unwrap();
        let to_q = |v: &[u32; 3]| -> [BigRational; 3] { std::array::from_fn(|k| int(v[k] as i64)) };
        let config = Configuration::Exact {
            field: BaseField::Prime(2),
            points: plane.points.iter().map(to_q).collect(),
            lines: plane.lines.iter().map(to_q).collect(),
        };
        assert_eq!(config.verify(&pattern), Ok(()));
        let Configuration::Exact { points, lines, .. } = config else { unreachable!() };
        let over_q = Configuration::Exact { field: BaseField::Rational, points, lines };
        assert!(over_q.verify(&pattern).is_err());
    }

    #[test]
    fn float_tolerances() {
        let pattern = IncidencePattern::from_rows(&[&[1, 0]]);
        let good = Configuration::Float { points: vec![[1.0, 0.0, 1e-12]], lines: vec![[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]] };
        assert_eq!(good.verify(&pattern), Ok(()));
        let close = Configuration::Float { points: vec![[1e-6, 0.0, 1.0]], lines: vec![[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]] };
        assert_eq!(close.verify(&pattern).unwrap_err().kind, MismatchKind::ExtraIncidence);
    }

    #[test]
    fn zero_vector_rejected() {
        let pattern = IncidencePattern::from_rows(&[&[1]]);
        let c = Configuration::Exact { field: BaseField::Rational, points: vec![v(0, 0, 0)], lines: vec![v(1, 0, 0)] };
        assert_eq!(c.verify(&pattern).unwrap_err().kind, MismatchKind::ZeroPoint);
    }
}

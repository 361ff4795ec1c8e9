use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GaloisField, GeometryError};
use crate::rational::frac;
use crate::tropical::{TropicalMatrix, TropicalValue};

/// PG(2,q): points and lines are normalized homogeneous triples over GF(q)
/// (first nonzero coordinate 1), each list sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePlane {
    pub field: GaloisField,
    pub points: Vec<[u32; 3]>,
    pub lines: Vec<[u32; 3]>,
    incidence: Vec<bool>,
}

/// How incidences are weighted in the emitted tropical matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightScheme {
    /// Every incidence becomes 1.
    Unit,
    /// Every incidence becomes `k/1000` with `k` uniform in `min_k..=max_k`.
    Random { seed: u64, min_k: u32, max_k: u32 },
}

impl WeightScheme {
    pub fn random(seed: u64) -> Self {
        WeightScheme::Random { seed, min_k: 1, max_k: 1000 }
    }
}

fn normalized_triples(field: &GaloisField) -> Vec<[u32; 3]> {
    let q = field.order();
    let mut out = Vec::with_capacity((q * q + q + 1) as usize);
    out.push([0, 0, 1]);
    for c in 0..q {
        out.push([0, 1, c]);
    }
    for b in 0..q {
        for c in 0..q {
            out.push([1, b, c]);
        }
    }
    out.sort_unstable();
    out
}

impl ProjectivePlane {
    pub fn new(q: u32) -> Result<Self, GeometryError> {
        let field = GaloisField::new(q)?;
        let points = normalized_triples(&field);
        let lines = points.clone();
        let mut incidence = Vec::with_capacity(points.len() * lines.len());
        for p in &points {
            for l in &lines {
                incidence.push(field.dot(p, l) == 0);
            }
        }
        let plane = ProjectivePlane { field, points, lines, incidence };
        plane.check_axioms()?;
        Ok(plane)
    }

    pub fn order(&self) -> u32 {
        self.field.order()
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn incident(&self, point: usize, line: usize) -> bool {
        self.incidence[point * self.lines.len() + line]
    }

    pub fn incidence_count(&self) -> usize {
        self.incidence.iter().filter(|&&b| b).count()
    }

    pub fn points_on(&self, line: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&p| self.incident(p, line)).collect()
    }

    /// Regularity plus unique join and meet, checked exhaustively.
    pub fn check_axioms(&self) -> Result<(), GeometryError> {
        let q = self.order() as usize;
        let n = q * q + q + 1;
        if self.points.len() != n || self.lines.len() != n {
            return Err(GeometryError::Axiom(format!("expected {n} points and lines")));
        }
        for l in 0..n {
            let on = (0..n).filter(|&p| self.incident(p, l)).count();
            if on != q + 1 {
                return Err(GeometryError::Axiom(format!("line {l} has {on} points")));
            }
        }
        for p in 0..n {
            let through = (0..n).filter(|&l| self.incident(p, l)).count();
            if through != q + 1 {
                return Err(GeometryError::Axiom(format!("point {p} is on {through} lines")));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                let joins = (0..n).filter(|&l| self.incident(a, l) && self.incident(b, l)).count();
                if joins != 1 {
                    return Err(GeometryError::Axiom(format!("points {a},{b} share {joins} lines")));
                }
                let meets = (0..n).filter(|&p| self.incident(p, a) && self.incident(p, b)).count();
                if meets != 1 {
                    return Err(GeometryError::Axiom(format!("lines {a},{b} share {meets} points")));
                }
            }
        }
        Ok(())
    }

    /// Rows are points, columns lines; 0 off the incidence relation and a
    /// positive weight on it.
    pub fn incidence_matrix(&self, weights: WeightScheme) -> Result<TropicalMatrix, GeometryError> {
        let n = self.size();
        let mut draw: Box<dyn FnMut() -> TropicalValue> = match weights {
            WeightScheme::Unit => Box::new(|| TropicalValue::int(1)),
            WeightScheme::Random { seed, min_k, max_k } => {
                if min_k == 0 || max_k < min_k {
                    return Err(GeometryError::NonPositiveWeight);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Box::new(move || TropicalValue::Finite(frac(rng.gen_range(min_k..=max_k) as i64, 1000)))
            }
        };
        let mut entries = Vec::with_capacity(n * n);
        for p in 0..n {
            for l in 0..n {
                entries.push(if self.incident(p, l) { draw() } else { TropicalValue::zero() });
            }
        }
        Ok(TropicalMatrix::new(n, n, entries).expect("square plane matrix"))
    }

    /// `P <i> <a> <b> <c>` and `L <j> <a> <b> <c>` lines.
    pub fn sidecar(&self) -> String {
        let mut out = format!("plane {}\n", self.order());
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!("P {i} {} {} {}\n", p[0], p[1], p[2]));
        }
        for (j, l) in self.lines.iter().enumerate() {
            out.push_str(&format!("L {j} {} {} {}\n", l[0], l[1], l[2]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SUPPORTED_ORDERS;

    #[test]
    fn fano_counts() {
        let p = ProjectivePlane::new(2).unwrap();
        assert_eq!(p.size(), 7);
        assert_eq!(p.incidence_count(), 21);
    }

    #[test]
    fn order_three_lines_have_four_points() {
        let p = ProjectivePlane::new(3).unwrap();
        assert_eq!(p.size(), 13);
        assert!((0..13).all(|l| p.points_on(l).len() == 4));
    }

    #[test]
    fn order_four() {
        let p = ProjectivePlane::new(4).unwrap();
        assert_eq!((p.size(), p.incidence_count()), (21, 105));
    }

    #[test]
    fn incidence_count_formula_for_all_orders() {
        for q in SUPPORTED_ORDERS {
            let p = ProjectivePlane::new(q).unwrap();
            let q = q as usize;
            assert_eq!(p.incidence_count(), (q * q + q + 1) * (q + 1));
        }
    }

    #[test]
    fn unit_matrix_of_fano() {
        let m = ProjectivePlane::new(2).unwrap().incidence_matrix(WeightScheme::Unit).unwrap();
        assert!(m.is_zero_one());
        let one = TropicalValue::int(1);
        assert_eq!(m.entries().iter().filter(|v| **v == one).count(), 21);
        for i in 0..7 {
            assert_eq!(m.row(i).iter().filter(|v| **v == one).count(), 3);
            assert_eq!((0..7).filter(|&r| *m.get(r, i) == one).count(), 3);
        }
    }

    #[test]
    fn random_weights_keep_the_zero_pattern() {
        let plane = ProjectivePlane::new(3).unwrap();
        let unit = plane.incidence_matrix(WeightScheme::Unit).unwrap();
        let weighted = plane.incidence_matrix(WeightScheme::random(1)).unwrap();
        let zero = TropicalValue::zero();
        for (u, w) in unit.entries().iter().zip(weighted.entries()) {
            assert_eq!(*u == zero, *w == zero);
            assert!(*w >= zero);
        }
        let ones = unit.entries().iter().filter(|v| **v != zero).count();
        assert_eq!(ones, 52);
    }

    #[test]
    fn zero_weight_is_rejected() {
        let plane = ProjectivePlane::new(2).unwrap();
        let bad = WeightScheme::Random { seed: 0, min_k: 0, max_k: 5 };
        assert_eq!(plane.incidence_matrix(bad), Err(GeometryError::NonPositiveWeight));
    }

    #[test]
    fn construction_is_deterministic() {
        let a = ProjectivePlane::new(5).unwrap();
        let b = ProjectivePlane::new(5).unwrap();
        assert_eq!(a.sidecar(), b.sidecar());
        assert_eq!(
            a.incidence_matrix(WeightScheme::random(9)).unwrap(),
            b.incidence_matrix(WeightScheme::random(9)).unwrap()
        );
    }
}

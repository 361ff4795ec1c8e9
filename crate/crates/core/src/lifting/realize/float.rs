//! Floating-point search: penalized gradient descent from random starts,
//! then alternating least squares on the incidences.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RealizabilityVerdict, RealizeOptions, Reduced};
use crate::lifting::pattern::FLOAT_SEPARATION;
use crate::lifting::{Configuration, IncidencePattern};

const DESCENT_STEPS: usize = 300;
const POLISH_SWEEPS: usize = 200;
const STEP: f64 = 0.05;
/// Target separation for non-incidences during descent, well above the
/// verification threshold.
const MARGIN: f64 = 0.1;

type V = Vector3<f64>;

fn random_unit(rng: &mut ChaCha8Rng) -> V {
    loop {
        let v = V::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// One side of the alternation: `mine` are updated against fixed `theirs`.
fn descend(mine: &mut [V], theirs: &[V], incident: &dyn Fn(usize, usize) -> bool) {
    for (i, v) in mine.iter_mut().enumerate() {
        let mut grad = V::zeros();
        for (j, w) in theirs.iter().enumerate() {
            let d = v.dot(w);
            if incident(i, j) {
                grad += 2.0 * d * w;
            } else if d.abs() < MARGIN {
                grad -= 2.0 * (MARGIN - d.abs()) * d.signum() * w;
            }
        }
        let tangent = grad - v.dot(&grad) * *v;
        let next = *v - STEP * tangent;
        *v = next.normalize();
    }
}

fn polish(mine: &mut [V], theirs: &[V], ones: &[Vec<usize>]) {
    for (v, on) in mine.iter_mut().zip(ones) {
        match on.len() {
            0 => {}
            1 => {
                let w = theirs[on[0]];
                let p = *v - v.dot(&w) * w;
                if p.norm() > 1e-12 {
                    *v = p.normalize();
                }
            }
            _ => {
                let mut a = Matrix3::zeros();
                for &j in on {
                    a += theirs[j] * theirs[j].transpose();
                }
                let eig = SymmetricEigen::new(a);
                let k = eig.eigenvalues.imin();
                let mut e: V = eig.eigenvectors.column(k).into();
                if e.dot(v) < 0.0 {
                    e = -e;
                }
                *v = e.normalize();
            }
        }
    }
}

fn attempt(pattern: &IncidencePattern, rng: &mut ChaCha8Rng) -> (Vec<V>, Vec<V>) {
    let mut points: Vec<V> = (0..pattern.rows()).map(|_| random_unit(rng)).collect();
    let mut lines: Vec<V> = (0..pattern.cols()).map(|_| random_unit(rng)).collect();
    for _ in 0..DESCENT_STEPS {
        descend(&mut points, &lines, &|i, j| pattern.get(i, j));
        descend(&mut lines, &points, &|j, i| pattern.get(i, j));
    }
    let row_ones: Vec<Vec<usize>> = (0..pattern.rows()).map(|i| pattern.row_ones(i)).collect();
    let col_ones: Vec<Vec<usize>> = (0..pattern.cols()).map(|j| pattern.col_ones(j)).collect();
    for _ in 0..POLISH_SWEEPS {
        polish(&mut points, &lines, &row_ones);
        polish(&mut lines, &points, &col_ones);
    }
    (points, lines)
}

fn restart_seed(master: u64, k: usize) -> u64 {
    master ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub(super) fn realize(reduced: &Reduced, options: &RealizeOptions) -> RealizabilityVerdict {
    let pattern = &reduced.pattern;
    let mut closest = f64::INFINITY;
    for k in 0..options.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(options.seed, k));
        let (points, lines) = attempt(pattern, &mut rng);
        let arr = |v: &V| [v[0], v[1], v[2]];
        let candidate = Configuration::Float {
            points: points.iter().map(arr).collect(),
            lines: lines.iter().map(arr).collect(),
        };
        if candidate.verify(pattern).is_ok() {
            return RealizabilityVerdict::Realized(reduced.expand_float(
                points.iter().map(arr).collect(),
                lines.iter().map(arr).collect(),
            ));
        }
        let worst = (0..pattern.rows())
            .flat_map(|i| (0..pattern.cols()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let d = points[i].dot(&lines[j]).abs();
                if pattern.get(i, j) { d } else { (FLOAT_SEPARATION - d).max(0.0) }
            })
            .fold(0.0, f64::max);
        closest = closest.min(worst);
    }
    RealizabilityVerdict::Unknown(format!(
        "no floating-point realization in {} restarts (smallest worst violation {closest:.3e}); not a proof",
        options.restarts
    ))
}

//! Minimum-cost perfect assignment with forbidden edges.
//!
//! Shortest augmenting paths with row/column potentials (the O(n³) Hungarian
//! method). Forbidden cells play the role of `∞` and are never relaxed, so
//! the potentials stay finite and the arithmetic stays exact.

use std::ops::{Add, Sub};

use num_rational::BigRational;
use num_traits::Zero;

pub trait Weight: Clone + Ord + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
}

impl Weight for i64 {
    fn zero() -> Self {
        0
    }
}

impl Weight for i128 {
    fn zero() -> Self {
        0
    }
}

impl Weight for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
}

/// Solves the `n × n` assignment problem; `cost(i, j) = None` forbids the cell.
///
/// Returns the optimal value and `assignment[i] = column of row i`, or `None`
/// when no perfect matching uses only allowed cells.
pub fn min_cost_assignment<W, F>(n: usize, cost: F) -> Option<(W, Vec<usize>)>
where
    W: Weight,
    F: Fn(usize, usize) -> Option<W>,
{
    if n == 0 {
        return Some((W::zero(), Vec::new()));
    }
    // 1-based; index 0 is the virtual column used to seed each augmentation.
    let mut u = vec![W::zero(); n + 1];
    let mut v = vec![W::zero(); n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<W>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta: Option<W> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if let Some(c) = cost(i0 - 1, j - 1) {
                    let reduced = c - u[i0].clone() - v[j].clone();
                    if minv[j].as_ref().is_none_or(|m| reduced < *m) {
                        minv[j] = Some(reduced);
                        way[j] = j0;
                    }
                }
                if let Some(m) = &minv[j] {
                    if delta.as_ref().is_none_or(|d| m < d) {
                        delta = Some(m.clone());
                        j1 = j;
                    }
                }
            }
            let delta = delta?;
            for j in 0..=n {
                if used[j] {
                    let r = matched_row[j];
                    u[r] = u[r].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = minv[j].take() {
                    minv[j] = Some(m - delta.clone());
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[matched_row[j] - 1] = j - 1;
    }
    let mut total = W::zero();
    for (i, &j) in assignment.iter().enumerate() {
        total = total + cost(i, j).expect("assignment uses allowed cells only");
    }
    Some((total, assignment))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: usize, cost: &dyn Fn(usize, usize) -> Option<i64>) -> Option<i64> {
        fn go(
            row: usize,
            n: usize,
            used: &mut Vec<bool>,
            acc: i64,
            cost: &dyn Fn(usize, usize) -> Option<i64>,
            best: &mut Option<i64>,
        ) {
            if row == n {
                if best.is_none_or(|b| acc < b) {
                    *best = Some(acc);
                }
                return;
            }
            for j in 0..n {
                if !used[j] {
                    if let Some(c) = cost(row, j) {
                        used[j] = true;
                        go(row + 1, n, used, acc + c, cost, best);
                        used[j] = false;
                    }
                }
            }
        }
        let mut best = None;
        go(0, n, &mut vec![false; n], 0, cost, &mut best);
        best
    }

    #[test]
    fn matches_enumeration_on_a_grid_of_small_instances() {
        // deterministic pseudo-random fill, roughly a quarter forbidden
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        for n in 1..=6 {
            for _ in 0..50 {
                let cells: Vec<Option<i64>> = (0..n * n)
                    .map(|_| {
                        let r = next();
                        if r % 4 == 0 {
                            None
                        } else {
                            Some(r % 21 - 10)
                        }
                    })
                    .collect();
                let cost = |i: usize, j: usize| cells[i * n + j];
                let fast = min_cost_assignment(n, cost).map(|(v, _)| v);
                assert_eq!(fast, brute(n, &cost));
            }
        }
    }

    #[test]
    fn fully_forbidden_row_has_no_assignment() {
        let cost = |i: usize, _j: usize| if i == 1 { None } else { Some(1i64) };
        assert!(min_cost_assignment(3, cost).is_none());
    }
}

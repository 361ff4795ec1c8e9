//! Barvinok rank: the least `k` with `M = L ⊗ R`, `L` of size `n × k`.
//!
//! Every factorization picks, for each finite cell, a rank-one term attaining
//! the minimum there. The search enumerates these coverings up to relabeling
//! of the terms (labels appear in first-use order) and tests each partial
//! covering with one difference-constraint system per term:
//! `a[i] + b[j] >= m[i][j]` on the term's rectangle of rows × columns, with
//! equality on the cells it covers. Rectangles may not contain `∞` cells.
//! Adding cells only adds constraints, so an infeasible partial covering
//! prunes its whole subtree.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::difference::DifferenceSystem;
use super::{min_plus_multiply, TropicalError, TropicalMatrix, TropicalValue};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarvinokFactorization {
    pub k: usize,
    pub left: TropicalMatrix,
    pub right: TropicalMatrix,
}

impl BarvinokFactorization {
    pub fn product(&self) -> TropicalMatrix {
        min_plus_multiply(&self.left, &self.right).expect("factor shapes agree")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarvinokRank {
    pub k: usize,
    /// Absent only for the all-`∞` matrix, whose rank is 0.
    pub factorization: Option<BarvinokFactorization>,
    /// Number of partial coverings visited across all levels.
    pub examined: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarvinokOptions {
    pub kmax: usize,
    pub budget: Option<u64>,
}

struct Term {
    rows: Vec<usize>,
    cols: Vec<usize>,
    cells: Vec<(usize, usize)>,
}

struct Covering<'a> {
    m: &'a TropicalMatrix,
    cells: Vec<(usize, usize)>,
    k: usize,
    terms: Vec<Term>,
    examined: u64,
    budget: Option<u64>,
}

enum Found {
    Yes(BarvinokFactorization),
    No,
    OutOfBudget,
}

impl<'a> Covering<'a> {
    fn entry(&self, i: usize, j: usize) -> Option<&BigRational> {
        self.m.get(i, j).finite()
    }

    fn rectangle_is_finite(&self, t: usize, i: usize, j: usize) -> bool {
        let term = &self.terms[t];
        let new_row = !term.rows.contains(&i);
        let new_col = !term.cols.contains(&j);
        if new_row && term.cols.iter().chain(std::iter::once(&j)).any(|&c| self.entry(i, c).is_none()) {
            return false;
        }
        if new_col && term.rows.iter().any(|&r| self.entry(r, j).is_none()) {
            return false;
        }
        true
    }

    /// Potentials `(a, b)` for term `t`, or `None` when infeasible.
    fn solve_term(&self, t: usize) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
        let term = &self.terms[t];
        let nr = term.rows.len();
        let mut sys = DifferenceSystem::new(nr + term.cols.len());
        // variables: a[r] at r, c[s] = -b[s] at nr + s; a + b >= m  <=>  c - a <= -m
        for (ri, &r) in term.rows.iter().enumerate() {
            for (ci, &c) in term.cols.iter().enumerate() {
                let m = self.entry(r, c).expect("rectangle is finite");
                sys.at_most(nr + ci, ri, -m.clone());
            }
        }
        for &(r, c) in &term.cells {
            let ri = term.rows.iter().position(|&x| x == r).expect("row in term");
            let ci = term.cols.iter().position(|&x| x == c).expect("col in term");
            let m = self.entry(r, c).expect("covered cell is finite");
            sys.at_most(ri, nr + ci, m.clone());
        }
        let x = sys.solve()?;
        let mut a: Vec<BigRational> = x[..nr].to_vec();
        let mut b: Vec<BigRational> = x[nr..].iter().map(|v| -v.clone()).collect();
        // normalize so the smallest row potential is 0
        if let Some(shift) = a.iter().min().cloned() {
            a.iter_mut().for_each(|v| *v -= &shift);
            b.iter_mut().for_each(|v| *v += &shift);
        }
        Some((a, b))
    }

    fn assign(&mut self, t: usize, i: usize, j: usize) -> (bool, bool) {
        let term = &mut self.terms[t];
        let new_row = !term.rows.contains(&i);
        let new_col = !term.cols.contains(&j);
        if new_row {
            term.rows.push(i);
        }
        if new_col {
            term.cols.push(j);
        }
        term.cells.push((i, j));
        (new_row, new_col)
    }

    fn unassign(&mut self, t: usize, added: (bool, bool)) {
        let term = &mut self.terms[t];
        term.cells.pop();
        if added.0 {
            term.rows.pop();
        }
        if added.1 {
            term.cols.pop();
        }
    }

    fn search(&mut self, idx: usize, used: usize) -> Found {
        self.examined += 1;
        if self.budget.is_some_and(|b| self.examined > b) {
            return Found::OutOfBudget;
        }
        if idx == self.cells.len() {
            return Found::Yes(self.factorization());
        }
        let (i, j) = self.cells[idx];
        let choices = (used + 1).min(self.k);
        for t in 0..choices {
            if !self.rectangle_is_finite(t, i, j) {
                continue;
            }
            let added = self.assign(t, i, j);
            if self.solve_term(t).is_some() {
                match self.search(idx + 1, used.max(t + 1)) {
                    Found::No => {}
                    other => return other,
                }
            }
            self.unassign(t, added);
        }
        Found::No
    }

    fn factorization(&self) -> BarvinokFactorization {
        let n = self.m.rows();
        let p = self.m.cols();
        let mut left = vec![TropicalValue::Infinity; n * self.k];
        let mut right = vec![TropicalValue::Infinity; self.k * p];
        for t in 0..self.k {
            if self.terms[t].cells.is_empty() {
                continue;
            }
            let (a, b) = self.solve_term(t).expect("leaf coverings are feasible");
            for (ri, &r) in self.terms[t].rows.iter().enumerate() {
                left[r * self.k + t] = TropicalValue::Finite(a[ri].clone());
            }
            for (ci, &c) in self.terms[t].cols.iter().enumerate() {
                right[t * p + c] = TropicalValue::Finite(b[ci].clone());
            }
        }
        BarvinokFactorization {
            k: self.k,
            left: TropicalMatrix::new(n, self.k, left).expect("shape"),
            right: TropicalMatrix::new(self.k, p, right).expect("shape"),
        }
    }
}

/// Least `k ≤ kmax` admitting a factorization, found by exhaustive covering
/// search at every smaller `k`.
pub fn barvinok_rank(m: &TropicalMatrix, options: BarvinokOptions) -> Result<BarvinokRank, TropicalError> {
    let cells: Vec<(usize, usize)> = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| m.get(i, j).is_finite())
        .collect();
    if cells.is_empty() {
        return Ok(BarvinokRank { k: 0, factorization: None, examined: 0 });
    }
    let mut examined = 0;
    for k in 1..=options.kmax {
        let mut cover = Covering {
            m,
            cells: cells.clone(),
            k,
            terms: (0..k).map(|_| Term { rows: vec![], cols: vec![], cells: vec![] }).collect(),
            examined: 0,
            budget: options.budget.map(|b| b.saturating_sub(examined)),
        };
        let found = cover.search(0, 0);
        examined += cover.examined;
        match found {
            Found::Yes(f) => {
                debug_assert_eq!(&f.product(), m);
                return Ok(BarvinokRank { k, factorization: Some(f), examined });
            }
            Found::No => {}
            Found::OutOfBudget => {
                return Err(TropicalError::BudgetExhausted {
                    level: k,
                    examined,
                    rank_at_least: None,
                });
            }
        }
    }
    Err(TropicalError::BarvinokExceeds { kmax: options.kmax })
}

/// `M = M ⊗ I` (or `I ⊗ M`), a factorization with `k = min(rows, cols)`.
pub fn trivial_factorization(m: &TropicalMatrix) -> BarvinokFactorization {
    if m.cols() <= m.rows() {
        BarvinokFactorization {
            k: m.cols(),
            left: m.clone(),
            right: TropicalMatrix::identity(m.cols()).expect("nonempty"),
        }
    } else {
        BarvinokFactorization {
            k: m.rows(),
            left: TropicalMatrix::identity(m.rows()).expect("nonempty"),
            right: m.clone(),
        }
    }
}

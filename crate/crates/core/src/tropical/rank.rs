//! Tropical rank: the largest `k` with a tropically nonsingular `k × k` minor.
//!
//! Nonsingular minors are closed under taking the sub-minor obtained by
//! deleting a row together with the column its unique optimal permutation
//! uses, so the first level that yields a witness in a top-down scan is the
//! rank, and every level above it was refuted exhaustively.
//!
//! Minors of size ≥ 4 are evaluated by expanding along their first row
//! against a table of `(value, multiplicity)` for all minors one size down,
//! when that table fits in memory.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::assignment::{min_cost_assignment, Weight};
use super::{SubmatrixWitness, TropicalError, TropicalMatrix, TropicalValue};
use crate::rational::lcm_of_denominators;

/// Largest table (entries) built for the first-row expansion.
const TABLE_LIMIT: usize = 1 << 23;
/// Entries are mapped to machine integers only below this magnitude.
const FAST_BOUND: i64 = 1 << 40;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOptions {
    /// Largest minor size considered.
    pub limit: Option<usize>,
    /// Maximum number of minors evaluated before giving up.
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropicalRank {
    pub rank: usize,
    /// A nonsingular `rank × rank` minor (empty when the rank is 0).
    pub witness: SubmatrixWitness,
    /// The level `rank + 1` when it was searched exhaustively without success;
    /// `None` when the rank already equals the size cap.
    pub refuted_level: Option<usize>,
    pub examined: u64,
}

/// Minor multiplicities are capped at 2: only "unique or not" matters.
#[derive(Clone, Debug)]
struct Det<C> {
    value: C,
    count: u8,
}

trait Cost: Clone + Ord {
    fn inf() -> Self;
    fn is_inf(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
}

impl Cost for i64 {
    fn inf() -> Self {
        i64::MAX / 4
    }
    fn is_inf(&self) -> bool {
        *self >= i64::MAX / 8
    }
    fn plus(&self, other: &Self) -> Self {
        if self.is_inf() || other.is_inf() {
            Self::inf()
        } else {
            self + other
        }
    }
}

impl Cost for TropicalValue {
    fn inf() -> Self {
        TropicalValue::Infinity
    }
    fn is_inf(&self) -> bool {
        !self.is_finite()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}

struct Binomials {
    table: Vec<Vec<usize>>,
}

impl Binomials {
    fn new(n: usize, k: usize) -> Self {
        let mut table = vec![vec![0usize; k + 2]; n + 1];
        for row in table.iter_mut() {
            row[0] = 1;
        }
        for i in 1..=n {
            for j in 1..=k + 1 {
                table[i][j] = table[i - 1][j - 1].saturating_add(table[i - 1][j]);
            }
        }
        Binomials { table }
    }

    fn get(&self, n: usize, k: usize) -> usize {
        if k >= self.table[0].len() {
            return 0;
        }
        self.table[n][k]
    }

    /// Colex rank of a sorted combination.
    fn rank(&self, combo: &[usize]) -> usize {
        combo.iter().enumerate().map(|(i, &c)| self.get(c, i + 1)).sum()
    }
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                go(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Matrix with rows and columns reordered by decreasing number of finite entries.
struct Search<C: Cost> {
    rows: usize,
    cols: usize,
    cells: Vec<C>,
    row_order: Vec<usize>,
    col_order: Vec<usize>,
    binom: Binomials,
    examined: u64,
    budget: Option<u64>,
}

struct Table<C> {
    level: usize,
    col_count: usize,
    dets: Vec<Det<C>>,
}

#[derive(Debug)]
struct OutOfBudget;

impl<C: Cost> Search<C> {
    fn new(m: &TropicalMatrix, convert: impl Fn(&TropicalValue) -> C, budget: Option<u64>) -> Self {
        let rows = m.rows();
        let cols = m.cols();
        let finite_in_row = |i: usize| (0..cols).filter(|&j| m.get(i, j).is_finite()).count();
        let finite_in_col = |j: usize| (0..rows).filter(|&i| m.get(i, j).is_finite()).count();
        let mut row_order: Vec<usize> = (0..rows).collect();
        row_order.sort_by_key(|&i| (std::cmp::Reverse(finite_in_row(i)), i));
        let mut col_order: Vec<usize> = (0..cols).collect();
        col_order.sort_by_key(|&j| (std::cmp::Reverse(finite_in_col(j)), j));
        let mut cells = Vec::with_capacity(rows * cols);
        for &i in &row_order {
            for &j in &col_order {
                cells.push(convert(m.get(i, j)));
            }
        }
        let binom = Binomials::new(rows.max(cols), rows.min(cols) + 1);
        Search { rows, cols, cells, row_order, col_order, binom, examined: 0, budget }
    }

    fn cell(&self, i: usize, j: usize) -> &C {
        &self.cells[i * self.cols + j]
    }

    fn charge(&mut self, n: u64) -> Result<(), OutOfBudget> {
        self.examined += n;
        match self.budget {
            Some(b) if self.examined > b => Err(OutOfBudget),
            _ => Ok(()),
        }
    }

    fn brute(&self, rows: &[usize], cols: &[usize], perms: &[Vec<usize>]) -> Det<C> {
        let mut best = Det { value: C::inf(), count: 0 };
        for p in perms {
            let mut sum = self.cell(rows[0], cols[p[0]]).clone();
            for (t, &pt) in p.iter().enumerate().skip(1) {
                sum = sum.plus(self.cell(rows[t], cols[pt]));
            }
            if sum.is_inf() {
                continue;
            }
            if best.count == 0 || sum < best.value {
                best = Det { value: sum, count: 1 };
            } else if sum == best.value {
                best.count = 2;
            }
        }
        best
    }

    fn expand(&self, table: &Table<C>, rows: &[usize], cols: &[usize], sub_ranks: &[usize]) -> Det<C> {
        let row_rank = self.binom.rank(&rows[1..]);
        let mut best = Det { value: C::inf(), count: 0 };
        for (t, &c) in cols.iter().enumerate() {
            let head = self.cell(rows[0], c);
            if head.is_inf() {
                continue;
            }
            let sub = &table.dets[row_rank * table.col_count + sub_ranks[t]];
            if sub.count == 0 {
                continue;
            }
            let sum = head.plus(&sub.value);
            if best.count == 0 || sum < best.value {
                best = Det { value: sum, count: sub.count };
            } else if sum == best.value {
                best.count = (best.count + sub.count).min(2);
            }
        }
        best
    }

    fn hungarian(&self, rows: &[usize], cols: &[usize]) -> Det<C>
    where
        C: Weight,
    {
        let k = rows.len();
        let cost = |i: usize, j: usize| {
            let c = self.cell(rows[i], cols[j]);
            (!c.is_inf()).then(|| c.clone())
        };
        let Some((value, assignment)) = min_cost_assignment(k, cost) else {
            return Det { value: C::inf(), count: 0 };
        };
        for (row, &col) in assignment.iter().enumerate() {
            let forbidden = |i: usize, j: usize| {
                if i == row && j == col {
                    None
                } else {
                    cost(i, j)
                }
            };
            if let Some((alt, _)) = min_cost_assignment(k, forbidden) {
                if alt == value {
                    return Det { value, count: 2 };
                }
            }
        }
        Det { value, count: 1 }
    }

    fn table_size(&self, level: usize) -> usize {
        self.binom
            .get(self.rows, level)
            .saturating_mul(self.binom.get(self.cols, level))
    }

    fn sub_ranks(&self, cols: &[usize], out: &mut Vec<usize>) {
        let k = cols.len();
        out.clear();
        let prefix: Vec<usize> = (0..=k)
            .scan(0usize, |acc, i| {
                let v = *acc;
                if i < k {
                    *acc += self.binom.get(cols[i], i + 1);
                }
                Some(v)
            })
            .collect();
        let mut suffix = vec![0usize; k + 1];
        for i in (0..k).rev() {
            suffix[i] = suffix[i + 1] + self.binom.get(cols[i], i);
        }
        for t in 0..k {
            out.push(prefix[t] + suffix[t + 1]);
        }
    }

    fn build_table(&mut self, level: usize) -> Result<Table<C>, OutOfBudget>
    where
        C: Weight,
    {
        let below = if level >= 4 && self.table_size(level - 1) <= TABLE_LIMIT {
            Some(self.build_table(level - 1)?)
        } else {
            None
        };
        let row_count = self.binom.get(self.rows, level);
        let col_count = self.binom.get(self.cols, level);
        self.charge((row_count * col_count) as u64)?;
        let perms = permutations(level);
        let mut dets = Vec::with_capacity(row_count * col_count);
        let mut sub = Vec::new();
        // tables are indexed by colex rank
        let row_combos = colex_combinations(self.rows, level);
        let col_combos = colex_combinations(self.cols, level);
        for rows in &row_combos {
            for c in &col_combos {
                let det = match &below {
                    Some(table) => {
                        self.sub_ranks(c, &mut sub);
                        self.expand(table, rows, c, &sub)
                    }
                    None if level <= 7 => self.brute(rows, c, &perms),
                    None => self.hungarian(rows, c),
                };
                dets.push(det);
            }
        }
        Ok(Table { level, col_count, dets })
    }

    /// Finds the lexicographically first nonsingular `k × k` minor.
    fn scan_level(&mut self, k: usize) -> Result<Option<SubmatrixWitness>, OutOfBudget>
    where
        C: Weight,
    {
        let table = if k >= 4 && self.table_size(k - 1) <= TABLE_LIMIT {
            Some(self.build_table(k - 1)?)
        } else {
            None
        };
        debug_assert!(table.as_ref().is_none_or(|t| t.level == k - 1));
        let perms = if table.is_none() && k <= 7 { permutations(k) } else { Vec::new() };
        let mut rows: Vec<usize> = (0..k).collect();
        let mut cols: Vec<usize> = (0..k).collect();
        let mut sub = Vec::new();
        let col_total = self.binom.get(self.cols, k) as u64;
        loop {
            self.charge(col_total)?;
            cols.iter_mut().enumerate().for_each(|(i, c)| *c = i);
            loop {
                let det = match &table {
                    Some(t) => {
                        self.sub_ranks(&cols, &mut sub);
                        self.expand(t, &rows, &cols, &sub)
                    }
                    None if k <= 7 => self.brute(&rows, &cols, &perms),
                    None => self.hungarian(&rows, &cols),
                };
                if det.count == 1 {
                    let mut wr: Vec<usize> = rows.iter().map(|&i| self.row_order[i]).collect();
                    let mut wc: Vec<usize> = cols.iter().map(|&j| self.col_order[j]).collect();
                    wr.sort_unstable();
                    wc.sort_unstable();
                    return Ok(Some(SubmatrixWitness { rows: wr, cols: wc }));
                }
                if !next_combination(&mut cols, self.cols) {
                    break;
                }
            }
            if !next_combination(&mut rows, self.rows) {
                return Ok(None);
            }
        }
    }
}

fn colex_combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    // lexicographic order of reversed combinations is colex order
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        out.push(combo.clone());
        // colex successor: increase the lowest position that can move
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            let limit = if i + 1 < k { combo[i + 1] } else { n };
            if combo[i] + 1 < limit {
                combo[i] += 1;
                for (j, c) in combo.iter_mut().enumerate().take(i) {
                    *c = j;
                }
                break;
            }
            i += 1;
        }
    }
}

/// Integer image of the matrix after clearing denominators, when small enough.
fn integer_cells(m: &TropicalMatrix) -> Option<impl Fn(&TropicalValue) -> i64> {
    let scale = lcm_of_denominators(m.finite_entries());
    let bound = BigInt::from(FAST_BOUND / (m.rows().max(m.cols()) as i64 + 1));
    for v in m.finite_entries() {
        let scaled = v * BigRational::from_integer(scale.clone());
        if scaled.to_integer().abs() >= bound {
            return None;
        }
    }
    Some(move |v: &TropicalValue| match v {
        TropicalValue::Finite(r) => (r * BigRational::from_integer(scale.clone()))
            .to_integer()
            .to_i64()
            .expect("bounded above"),
        TropicalValue::Infinity => i64::inf(),
    })
}

impl Weight for TropicalValue {
    fn zero() -> Self {
        TropicalValue::zero()
    }
}

impl std::ops::Sub for TropicalValue {
    type Output = TropicalValue;

    fn sub(self, rhs: TropicalValue) -> TropicalValue {
        match (self, rhs) {
            (TropicalValue::Finite(a), TropicalValue::Finite(b)) => TropicalValue::Finite(a - b),
            _ => TropicalValue::Infinity,
        }
    }
}

fn run<C: Cost + Weight>(mut search: Search<C>, kmax: usize) -> Result<TropicalRank, TropicalError> {
    // Nonsingularity passes to minors (a unique optimal permutation stays
    // unique on any row/column deletion it respects), so once every k×k
    // minor is singular so is every larger one. Ascending finds the same
    // rank, witness and refuted level as descending, at a fraction of the cost.
    let mut rank = 0;
    let mut witness = SubmatrixWitness { rows: vec![], cols: vec![] };
    for k in 1..=kmax {
        match search.scan_level(k) {
            Ok(Some(w)) => {
                rank = k;
                witness = w;
            }
            Ok(None) => {
                return Ok(TropicalRank { rank, witness, refuted_level: Some(k), examined: search.examined });
            }
            Err(OutOfBudget) => {
                return Err(TropicalError::BudgetExhausted {
                    level: k,
                    examined: search.examined,
                    rank_at_least: (rank > 0).then_some(rank),
                });
            }
        }
    }
    Ok(TropicalRank { rank, witness, refuted_level: None, examined: search.examined })
}

/// Tropical rank with a witness minor, searching sizes upward until a level is refuted.
pub fn tropical_rank(m: &TropicalMatrix, options: RankOptions) -> Result<TropicalRank, TropicalError> {
    let cap = m.rows().min(m.cols());
    let kmax = options.limit.map_or(cap, |l| l.min(cap));
    match integer_cells(m) {
        Some(convert) => run(Search::new(m, convert, options.budget), kmax),
        None => run(Search::new(m, TropicalValue::clone, options.budget), kmax),
    }
}

/// Outcome of checking randomly sampled minors; never a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorSample {
    pub size: usize,
    pub sampled: u64,
    pub first_nonsingular: Option<SubmatrixWitness>,
}

/// Samples `count` uniformly random `k × k` minors and reports the first
/// nonsingular one met, if any.
pub fn sample_minors<R: Rng>(
    m: &TropicalMatrix,
    k: usize,
    count: u64,
    rng: &mut R,
) -> Result<MinorSample, TropicalError> {
    if k == 0 || k > m.rows().min(m.cols()) {
        return Err(TropicalError::MinorSize { k });
    }
    let perms = permutations(k);
    let search = match integer_cells(m) {
        Some(convert) => Search::new(m, convert, None),
        None => return Err(TropicalError::NotMachineSized),
    };
    // Search reorders rows and columns; sample positions in that order.
    for s in 0..count {
        let mut rows = sample(rng, m.rows(), k).into_vec();
        let mut cols = sample(rng, m.cols(), k).into_vec();
        rows.sort_unstable();
        cols.sort_unstable();
        let det = search.brute(&rows, &cols, &perms);
        if det.count == 1 {
            let mut wr: Vec<usize> = rows.iter().map(|&i| search.row_order[i]).collect();
            let mut wc: Vec<usize> = cols.iter().map(|&j| search.col_order[j]).collect();
            wr.sort_unstable();
            wc.sort_unstable();
            return Ok(MinorSample {
                size: k,
                sampled: s + 1,
                first_nonsingular: Some(SubmatrixWitness { rows: wr, cols: wc }),
            });
        }
    }
    Ok(MinorSample { size: k, sampled: count, first_nonsingular: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropical::is_nonsingular;

    fn fano() -> TropicalMatrix {
        // lines of PG(2,2) as point triples
        let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        TropicalMatrix::from_fn(7, 7, |i, j| {
            TropicalValue::int(if lines[j].contains(&i) { 1 } else { 0 })
        })
        .unwrap()
    }

    #[test]
    fn combination_helpers_agree() {
        let b = Binomials::new(7, 4);
        for (idx, c) in colex_combinations(7, 3).iter().enumerate() {
            assert_eq!(b.rank(c), idx);
        }
        let mut c = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut c, 5) {
            n += 1;
        }
        assert_eq!(n, 10);
    }

    #[test]
    fn all_zero_has_rank_one() {
        for n in 1..=5 {
            let z = TropicalMatrix::from_fn(n, n, |_, _| TropicalValue::zero()).unwrap();
            let r = tropical_rank(&z, RankOptions::default()).unwrap();
            assert_eq!(r.rank, 1);
            if n > 1 {
                assert_eq!(r.refuted_level, Some(2));
            }
        }
    }

    #[test]
    fn identity_has_full_rank() {
        for n in 1..=6 {
            let r = tropical_rank(&TropicalMatrix::identity(n).unwrap(), RankOptions::default()).unwrap();
            assert_eq!(r.rank, n);
            assert_eq!(r.refuted_level, None);
        }
    }

    #[test]
    fn fano_has_rank_three() {
        let r = tropical_rank(&fano(), RankOptions::default()).unwrap();
        assert_eq!(r.rank, 3);
        assert_eq!(r.refuted_level, Some(4));
        let w = fano().submatrix(&r.witness.rows, &r.witness.cols).unwrap();
        assert!(is_nonsingular(&w).unwrap());
    }

    #[test]
    fn expansion_agrees_with_hungarian_on_fano_minors() {
        // level 5 uses the level-4 table, which in turn expands the level-3 brute force
        let m = fano();
        let mut s = Search::new(&m, integer_cells(&m).unwrap(), None);
        let table = s.build_table(5).unwrap();
        let combos = colex_combinations(7, 5);
        for (ri, r) in combos.iter().enumerate() {
            for (ci, c) in combos.iter().enumerate() {
                let det = &table.dets[ri * table.col_count + ci];
                let direct = s.hungarian(r, c);
                assert_eq!(det.count == 1, direct.count == 1);
                if det.count > 0 {
                    assert_eq!(det.value, direct.value);
                }
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let opts = RankOptions { limit: None, budget: Some(10) };
        let err = tropical_rank(&fano(), opts).unwrap_err();
        assert!(matches!(err, TropicalError::BudgetExhausted { .. }));
    }

    #[test]
    fn all_infinite_has_rank_zero() {
        let m = TropicalMatrix::from_rows(&[vec![None, None], vec![None, None]]).unwrap();
        assert_eq!(tropical_rank(&m, RankOptions::default()).unwrap().rank, 0);
    }

    #[test]
    fn huge_entries_use_exact_fallback() {
        let big = "123456789012345678901234567890";
        let v = TropicalValue::parse(big).unwrap();
        let m = TropicalMatrix::from_fn(3, 3, |i, j| if i == j { v.clone() } else { TropicalValue::Infinity }).unwrap();
        assert_eq!(tropical_rank(&m, RankOptions::default()).unwrap().rank, 3);
    }

    #[test]
    fn limit_caps_the_search() {
        let opts = RankOptions { limit: Some(2), budget: None };
        let r = tropical_rank(&TropicalMatrix::identity(4).unwrap(), opts).unwrap();
        assert_eq!(r.rank, 2);
    }
}

//! Systems of difference constraints `x[v] - x[u] <= w`, solved by
//! Bellman–Ford from a virtual source joined to every variable by a
//! zero-weight edge. A negative cycle means the system is infeasible.

use num_rational::BigRational;
use num_traits::Zero;

#[derive(Clone, Debug, Default)]
pub struct DifferenceSystem {
    vars: usize,
    edges: Vec<(usize, usize, BigRational)>,
}

impl DifferenceSystem {
    pub fn new(vars: usize) -> Self {
        DifferenceSystem { vars, edges: Vec::new() }
    }

    /// Adds `x[v] - x[u] <= w`.
    pub fn at_most(&mut self, v: usize, u: usize, w: BigRational) {
        self.edges.push((u, v, w));
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Shortest-path potentials (every value ≤ 0), or `None` on a negative cycle.
    pub fn solve(&self) -> Option<Vec<BigRational>> {
        let mut dist = vec![BigRational::zero(); self.vars];
        for _ in 0..=self.vars {
            let mut changed = false;
            for (u, v, w) in &self.edges {
                let candidate = &dist[*u] + w;
                if candidate < dist[*v] {
                    dist[*v] = candidate;
                    changed = true;
                }
            }
            if !changed {
                return Some(dist);
            }
        }
        None
    }
}

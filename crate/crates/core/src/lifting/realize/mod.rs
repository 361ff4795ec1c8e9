//! Rank-3 realizability: find points and lines in the plane whose
//! incidences are exactly a given pattern.

mod exact;
mod finite;
mod float;

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{BaseField, Configuration, IncidencePattern};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RealizeField {
    Rational,
    Prime(u64),
    Float,
}

impl RealizeField {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "float" | "f64" => Some(RealizeField::Float),
            _ => match BaseField::parse(s)? {
                BaseField::Rational => Some(RealizeField::Rational),
                BaseField::Prime(p) => Some(RealizeField::Prime(p)),
            },
        }
    }

    pub fn tag(&self) -> String {
        match self {
            RealizeField::Rational => "q".to_string(),
            RealizeField::Prime(p) => format!("gf{p}"),
            RealizeField::Float => "float".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizeOptions {
    pub seed: u64,
    /// Search nodes for the exact engines.
    pub budget: u64,
    /// Restarts for the floating-point engine.
    pub restarts: usize,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions { seed: 0, budget: 200_000, restarts: 20 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RealizabilityVerdict {
    Realized(Configuration),
    /// Every branch of the search ended in a contradiction; the trace
    /// records them.
    ProvedInfeasible(Vec<String>),
    Unknown(String),
}

impl RealizabilityVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            RealizabilityVerdict::Realized(_) => "realized",
            RealizabilityVerdict::ProvedInfeasible(_) => "infeasible",
            RealizabilityVerdict::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for RealizabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealizabilityVerdict::Realized(c) => write!(f, "realized over {}", c.field_tag()),
            RealizabilityVerdict::ProvedInfeasible(trace) => {
                writeln!(f, "infeasible")?;
                for line in trace {
                    writeln!(f, "  {line}")?;
                }
                Ok(())
            }
            RealizabilityVerdict::Unknown(why) => write!(f, "unknown: {why}"),
        }
    }
}

/// Pattern with duplicate rows and columns merged. Equal rows may share a
/// point, so realizing the reduced pattern realizes the original.
pub(crate) struct Reduced {
    pub pattern: IncidencePattern,
    pub row_class: Vec<usize>,
    pub col_class: Vec<usize>,
}

fn classes(n: usize, key: impl Fn(usize) -> Vec<bool>) -> (Vec<usize>, Vec<usize>) {
    let mut reps: Vec<usize> = Vec::new();
    let mut seen: std::collections::HashMap<Vec<bool>, usize> = std::collections::HashMap::new();
    let class = (0..n)
        .map(|i| {
            *seen.entry(key(i)).or_insert_with(|| {
                reps.push(i);
                reps.len() - 1
            })
        })
        .collect();
    (class, reps)
}

impl Reduced {
    pub fn new(p: &IncidencePattern) -> Self {
        let (row_class, row_reps) = classes(p.rows(), |i| (0..p.cols()).map(|j| p.get(i, j)).collect());
        let (col_class, col_reps) = classes(p.cols(), |j| (0..p.rows()).map(|i| p.get(i, j)).collect());
        let pattern = IncidencePattern::from_fn(row_reps.len(), col_reps.len(), |i, j| p.get(row_reps[i], col_reps[j]));
        Reduced { pattern, row_class, col_class }
    }

    pub fn expand_exact(&self, field: BaseField, points: Vec<[BigRational; 3]>, lines: Vec<[BigRational; 3]>) -> Configuration {
        Configuration::Exact {
            field,
            points: self.row_class.iter().map(|&c| points[c].clone()).collect(),
            lines: self.col_class.iter().map(|&c| lines[c].clone()).collect(),
        }
    }

    pub fn expand_float(&self, points: Vec<[f64; 3]>, lines: Vec<[f64; 3]>) -> Configuration {
        Configuration::Float {
            points: self.row_class.iter().map(|&c| points[c]).collect(),
            lines: self.col_class.iter().map(|&c| lines[c]).collect(),
        }
    }
}

/// Two distinct points on two distinct lines: impossible over any field.
fn double_incidence(p: &IncidencePattern) -> Option<String> {
    for a in 0..p.rows() {
        for b in a + 1..p.rows() {
            let shared: Vec<usize> = (0..p.cols()).filter(|&j| p.get(a, j) && p.get(b, j)).collect();
            if shared.len() >= 2 {
                return Some(format!(
                    "distinct points {a} and {b} both lie on distinct lines {} and {}",
                    shared[0], shared[1]
                ));
            }
        }
    }
    None
}

/// Searches for a configuration over `field` realizing `pattern`
/// (a one means the point lies on the line, a zero that it does not).
pub fn realize_rank3(pattern: &IncidencePattern, field: RealizeField, options: &RealizeOptions) -> RealizabilityVerdict {
    let reduced = Reduced::new(pattern);
    let verdict = match field {
        RealizeField::Float => float::realize(&reduced, options),
        exact_field => {
            if let Some(reason) = double_incidence(&reduced.pattern) {
                let trace = vec![
                    format!("merged to {} distinct points and {} distinct lines", reduced.pattern.rows(), reduced.pattern.cols()),
                    reason.to_string(),
                ];
                return RealizabilityVerdict::ProvedInfeasible(trace);
            }
            match exact_field {
                RealizeField::Rational => exact::realize(&reduced, options),
                RealizeField::Prime(p) => finite::realize(&reduced, p, options),
                RealizeField::Float => unreachable!(),
            }
        }
    };
    if let RealizabilityVerdict::Realized(c) = &verdict {
        if let Err(m) = c.verify(pattern) {
            return RealizabilityVerdict::Unknown(format!("candidate failed verification: {m}"));
        }
    }
    verdict
}

/// Checks a supplied configuration against the pattern.
pub fn realize_guided(pattern: &IncidencePattern, hint: &Configuration) -> RealizabilityVerdict {
    match hint.verify(pattern) {
        Ok(()) => RealizabilityVerdict::Realized(hint.clone()),
        Err(m) => RealizabilityVerdict::Unknown(format!("hint does not realize the pattern: {m}")),
    }
}

/// Facts about a reduced pattern used to fix coordinates without loss of
/// generality.
pub(crate) struct Joins {
    join: Vec<Option<usize>>,
    n: usize,
}

impl Joins {
    pub fn new(p: &IncidencePattern) -> Self {
        let n = p.rows();
        let mut join = vec![None; n * n];
        for j in 0..p.cols() {
            let on = p.col_ones(j);
            for (x, &a) in on.iter().enumerate() {
                for &b in &on[x + 1..] {
                    join[a * n + b] = Some(j);
                    join[b * n + a] = Some(j);
                }
            }
        }
        Joins { join, n }
    }

    fn noncollinear(&self, p: &IncidencePattern, a: usize, b: usize, c: usize) -> bool {
        let off = |x: usize, y: usize, z: usize| self.join[x * self.n + y].is_some_and(|j| !p.get(z, j));
        off(a, b, c) || off(a, c, b) || off(b, c, a)
    }

    /// Points provably in general position: four if possible, else three
    /// non-collinear, else up to two.
    pub fn frame(&self, p: &IncidencePattern) -> Vec<usize> {
        let mut order: Vec<usize> = (0..p.rows()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(p.row_ones(i).len()));
        order.truncate(24);
        let m = order.len();
        let mut triangle = None;
        for x in 0..m {
            for y in x + 1..m {
                for z in y + 1..m {
                    let (a, b, c) = (order[x], order[y], order[z]);
                    if !self.noncollinear(p, a, b, c) {
                        continue;
                    }
                    triangle.get_or_insert([a, b, c]);
                    for &d in &order[z + 1..] {
                        if self.noncollinear(p, a, b, d) && self.noncollinear(p, a, c, d) && self.noncollinear(p, b, c, d) {
                            return vec![a, b, c, d];
                        }
                    }
                }
            }
        }
        match triangle {
            Some(t) => t.to_vec(),
            None => order.into_iter().take(2).collect(),
        }
    }
}

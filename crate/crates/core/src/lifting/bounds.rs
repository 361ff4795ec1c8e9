use std::fmt;

use super::{realize_rank3, IncidencePattern, RealizabilityVerdict, RealizeField, RealizeOptions};
use crate::tropical::{barvinok_rank, trivial_factorization, tropical_rank, BarvinokOptions, RankOptions, TropicalError, TropicalMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSource {
    TropicalRank,
    Barvinok,
    /// `min(rows, cols)` single-row terms.
    Trivial,
    /// An exact rank-3 configuration over ℚ, which lifts.
    Realization,
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundSource::TropicalRank => "tropical rank",
            BoundSource::Barvinok => "barvinok rank",
            BoundSource::Trivial => "trivial factorization",
            BoundSource::Realization => "rational configuration",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bound {
    pub value: usize,
    pub source: BoundSource,
    /// The search behind the preferred source ran out of budget.
    pub exhausted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KapranovBounds {
    pub lower: Bound,
    pub upper: Bound,
    pub tight: bool,
    /// Outcome of the configuration search for (0,1) matrices, if requested.
    pub realizability: Option<(RealizeField, RealizabilityVerdict)>,
}

#[derive(Clone, Debug, Default)]
pub struct BoundsOptions {
    /// Evaluation budget for each of the two rank searches.
    pub budget: Option<u64>,
    /// Field and options for the rank-3 configuration search.
    pub realize: Option<(RealizeField, RealizeOptions)>,
}

/// Lower bound from the tropical rank, upper bound from Barvinok
/// factorizations; for (0,1) matrices realized over ℚ the upper bound
/// drops to 3. Configurations over finite fields or floats are reported
/// but do not move the bounds.
pub fn kapranov_bounds(m: &TropicalMatrix, options: &BoundsOptions) -> Result<KapranovBounds, TropicalError> {
    let lower = match tropical_rank(m, RankOptions { limit: None, budget: options.budget }) {
        Ok(r) => Bound { value: r.rank, source: BoundSource::TropicalRank, exhausted: false },
        Err(TropicalError::BudgetExhausted { rank_at_least: Some(k), .. }) => {
            Bound { value: k, source: BoundSource::TropicalRank, exhausted: true }
        }
        Err(TropicalError::BudgetExhausted { .. }) => {
            let any_finite = m.finite_entries().next().is_some();
            Bound { value: any_finite as usize, source: BoundSource::Trivial, exhausted: true }
        }
        Err(e) => return Err(e),
    };
    let kmax = m.rows().min(m.cols());
    let mut upper = match barvinok_rank(m, BarvinokOptions { kmax, budget: options.budget }) {
        Ok(b) => Bound { value: b.k, source: BoundSource::Barvinok, exhausted: false },
        Err(TropicalError::BudgetExhausted { .. }) | Err(TropicalError::BarvinokExceeds { .. }) => {
            Bound { value: trivial_factorization(m).k, source: BoundSource::Trivial, exhausted: true }
        }
        Err(e) => return Err(e),
    };
    let mut realizability = None;
    if let (Some((field, realize)), Ok(pattern)) = (&options.realize, IncidencePattern::from_matrix(m)) {
        let verdict = realize_rank3(&pattern, *field, realize);
        if *field == RealizeField::Rational && matches!(verdict, RealizabilityVerdict::Realized(_)) && upper.value > 3 {
            upper = Bound { value: 3, source: BoundSource::Realization, exhausted: upper.exhausted };
        }
        realizability = Some((*field, verdict));
    }
    let tight = lower.source == BoundSource::TropicalRank && lower.value == upper.value;
    Ok(KapranovBounds { lower, upper, tight, realizability })
}

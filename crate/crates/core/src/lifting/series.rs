//! Truncated power series in `t` with nonnegative rational exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::LiftError;
use crate::rational::{format_rational, modulo, parse_rational};

/// Coefficient field of a series: ℚ or a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseField {
    Rational,
    Prime(u64),
}

impl BaseField {
    /// Canonical representative: unchanged over ℚ, residue in `0..p` over GF(p).
    pub fn normalize(&self, c: &BigRational) -> Result<BigRational, LiftError> {
        match self {
            BaseField::Rational => Ok(c.clone()),
            BaseField::Prime(p) => {
                let num = modulo(c.numer(), *p);
                let den = modulo(c.denom(), *p);
                let inv = mod_inverse(den, *p).ok_or(LiftError::NotInField)?;
                Ok(BigRational::from_integer(BigInt::from(mul_mod(num, inv, *p))))
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            BaseField::Rational => "q".to_string(),
            BaseField::Prime(p) => format!("gf{p}"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "q" | "Q" | "rational" => Some(BaseField::Rational),
            _ => {
                let p: u64 = s.strip_prefix("gf")?.parse().ok()?;
                (p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).then_some(BaseField::Prime(p))
            }
        }
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    // Fermat: a^(p-2)
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    Some(acc)
}

/// Precision of a series: known exactly, or only below an exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Truncation {
    Exact,
    Below(BigRational),
}

impl Truncation {
    fn min(&self, other: &Truncation) -> Truncation {
        match (self, other) {
            (Truncation::Exact, t) | (t, Truncation::Exact) => t.clone(),
            (Truncation::Below(a), Truncation::Below(b)) => Truncation::Below(a.min(b).clone()),
        }
    }

    fn shifted(&self, by: &BigRational) -> Truncation {
        match self {
            Truncation::Exact => Truncation::Exact,
            Truncation::Below(o) => Truncation::Below(o + by),
        }
    }

    fn admits(&self, exponent: &BigRational) -> bool {
        match self {
            Truncation::Exact => true,
            Truncation::Below(o) => exponent < o,
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Exact => f.write_str("exact"),
            Truncation::Below(o) => f.write_str(&format_rational(o)),
        }
    }
}

/// Order of vanishing of a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesValuation {
    Value(BigRational),
    /// No nonzero term below the truncation order.
    AtLeast(BigRational),
    /// The exact zero series.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    field: BaseField,
    terms: BTreeMap<BigRational, BigRational>,
    truncation: Truncation,
}

impl TruncatedSeries {
    pub fn new(
        field: BaseField,
        terms: impl IntoIterator<Item = (BigRational, BigRational)>,
        truncation: Truncation,
    ) -> Result<Self, LiftError> {
        let mut s = TruncatedSeries { field, terms: BTreeMap::new(), truncation };
        for (e, c) in terms {
            if e.is_negative() {
                return Err(LiftError::NegativeExponent);
            }
            let c = field.normalize(&c)?;
            let slot = s.terms.entry(e).or_insert_with(BigRational::zero);
            *slot = field.normalize(&(&*slot + c))?;
        }
        s.clean();
        Ok(s)
    }

    pub fn zero(field: BaseField, truncation: Truncation) -> Self {
        TruncatedSeries { field, terms: BTreeMap::new(), truncation }
    }

    pub fn constant(field: BaseField, c: BigRational, truncation: Truncation) -> Result<Self, LiftError> {
        Self::new(field, [(BigRational::zero(), c)], truncation)
    }

    /// `c · t^e`.
    pub fn monomial(field: BaseField, c: BigRational, e: BigRational, truncation: Truncation) -> Result<Self, LiftError> {
        Self::new(field, [(e, c)], truncation)
    }

    fn clean(&mut self) {
        let trunc = self.truncation.clone();
        self.terms.retain(|e, c| !c.is_zero() && trunc.admits(e));
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.truncation == Truncation::Exact
    }

    pub fn valuation(&self) -> SeriesValuation {
        match (self.terms.keys().next(), &self.truncation) {
            (Some(e), _) => SeriesValuation::Value(e.clone()),
            (None, Truncation::Exact) => SeriesValuation::Infinite,
            (None, Truncation::Below(o)) => SeriesValuation::AtLeast(o.clone()),
        }
    }

    /// A lower bound on the valuation (`None` for exact zero).
    fn valuation_floor(&self) -> Option<BigRational> {
        match self.valuation() {
            SeriesValuation::Value(v) | SeriesValuation::AtLeast(v) => Some(v),
            SeriesValuation::Infinite => None,
        }
    }

    fn check_field(&self, other: &Self) -> Result<(), LiftError> {
        if self.field != other.field {
            return Err(LiftError::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LiftError> {
        self.check_field(other)?;
        let mut out = TruncatedSeries {
            field: self.field,
            terms: self.terms.clone(),
            truncation: self.truncation.min(&other.truncation),
        };
        for (e, c) in &other.terms {
            let slot = out.terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *slot = self.field.normalize(&(&*slot + c))?;
        }
        out.clean();
        Ok(out)
    }

    pub fn neg(&self) -> Result<Self, LiftError> {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c.clone()));
        Self::new(self.field, terms, self.truncation.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LiftError> {
        self.add(&other.neg()?)
    }

    /// Product; the result is known below `min(O_a + val(b), O_b + val(a))`.
    pub fn mul(&self, other: &Self) -> Result<Self, LiftError> {
        self.check_field(other)?;
        let (Some(va), Some(vb)) = (self.valuation_floor(), other.valuation_floor()) else {
            return Ok(TruncatedSeries::zero(self.field, Truncation::Exact));
        };
        let truncation = self.truncation.shifted(&vb).min(&other.truncation.shifted(&va));
        let mut out = TruncatedSeries { field: self.field, terms: BTreeMap::new(), truncation };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if !out.truncation.admits(&e) {
                    continue;
                }
                let slot = out.terms.entry(e).or_insert_with(BigRational::zero);
                *slot = self.field.normalize(&(&*slot + ca * cb))?;
            }
        }
        out.clean();
        Ok(out)
    }

    /// `c1*t^e1 + c2*t^e2 + ...`, or `0`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{}*t^{}", format_rational(c), format_rational(e)))
            .collect();
        parts.join(" + ")
    }

    /// Parses the output of [`TruncatedSeries::to_text`]; also accepts bare
    /// coefficients, `t`, `c*t`, `t^e` and `-` between terms.
    pub fn parse(text: &str, field: BaseField, truncation: Truncation) -> Result<Self, LiftError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(LiftError::Parse(text.to_string()));
        }
        let mut pieces: Vec<String> = Vec::new();
        let mut current = String::new();
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            let is_sign = ch == '+' || ch == '-';
            let splits = is_sign && prev.is_some_and(|p| !matches!(p, '^' | '*' | '/' | '+' | '-'));
            if splits {
                pieces.push(std::mem::take(&mut current));
                if ch == '-' {
                    current.push('-');
                }
            } else if !(ch == '+' && current.is_empty()) {
                current.push(ch);
            }
            prev = Some(ch);
        }
        pieces.push(current);
        let mut terms = Vec::new();
        for piece in pieces {
            terms.push(parse_term(&piece).ok_or_else(|| LiftError::Parse(piece.clone()))?);
        }
        Self::new(field, terms, truncation)
    }
}

fn parse_term(piece: &str) -> Option<(BigRational, BigRational)> {
    let (sign, body) = match piece.strip_prefix('-') {
        Some(rest) => (-BigRational::one(), rest),
        None => (BigRational::one(), piece),
    };
    let (coeff, power) = match body.find('t') {
        None => (parse_rational(body)?, BigRational::zero()),
        Some(pos) => {
            let coeff_text = body[..pos].trim_end_matches('*');
            let coeff = if coeff_text.is_empty() { BigRational::one() } else { parse_rational(coeff_text)? };
            let rest = &body[pos + 1..];
            let power = match rest.strip_prefix('^') {
                Some(e) => parse_rational(e.trim_start_matches('(').trim_end_matches(')'))?,
                None if rest.is_empty() => BigRational::one(),
                None => return None,
            };
            (coeff, power)
        }
    };
    Some((power, sign * coeff))
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())?;
        if let Truncation::Below(o) = &self.truncation {
            write!(f, " + O(t^{})", format_rational(o))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    const Q: BaseField = BaseField::Rational;

    fn s(text: &str) -> TruncatedSeries {
        TruncatedSeries::parse(text, Q, Truncation::Below(int(3))).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(s("3*t^(1/2) + t").valuation(), SeriesValuation::Value(frac(1, 2)));
        assert_eq!(s("2 + 5*t").valuation(), SeriesValuation::Value(int(0)));
        assert_eq!(s("0").valuation(), SeriesValuation::AtLeast(int(3)));
        let exact = TruncatedSeries::zero(Q, Truncation::Exact);
        assert_eq!(exact.valuation(), SeriesValuation::Infinite);
    }

    #[test]
    fn product_cancels_middle_terms() {
        let p = s("1 + t").mul(&s("1 - t")).unwrap();
        assert_eq!(p, s("1 - t^2"));
        assert_eq!(p.valuation(), SeriesValuation::Value(int(0)));
    }

    #[test]
    fn product_tightens_truncation() {
        // (t + O(t^3)) * (t + O(t^3)) is known below 4
        let p = s("t").mul(&s("t")).unwrap();
        assert_eq!(p.truncation(), &Truncation::Below(int(4)));
    }

    #[test]
    fn field_mismatch() {
        let a = TruncatedSeries::constant(Q, int(1), Truncation::Exact).unwrap();
        let b = TruncatedSeries::constant(BaseField::Prime(2), int(1), Truncation::Exact).unwrap();
        assert_eq!(a.add(&b), Err(LiftError::FieldMismatch));
    }

    #[test]
    fn prime_field_reduces() {
        let f = BaseField::Prime(2);
        let a = TruncatedSeries::constant(f, int(1), Truncation::Exact).unwrap();
        assert!(a.add(&a).unwrap().is_exact_zero());
        assert_eq!(f.normalize(&frac(1, 3)).unwrap(), int(1));
        assert_eq!(BaseField::Prime(3).normalize(&frac(1, 3)), Err(LiftError::NotInField));
    }

    #[test]
    fn text_round_trip() {
        let a = s("1/2*t^(1/3) - 4 + t^2");
        assert_eq!(TruncatedSeries::parse(&a.to_text(), Q, Truncation::Below(int(3))).unwrap(), a);
        assert!(TruncatedSeries::parse("1 + x", Q, Truncation::Exact).is_err());
    }

    #[test]
    fn field_tags() {
        assert_eq!(BaseField::parse("gf7"), Some(BaseField::Prime(7)));
        assert_eq!(BaseField::parse("gf6"), None);
        assert_eq!(BaseField::parse("q"), Some(Q));
    }
}

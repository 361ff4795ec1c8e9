//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are plain indices; callers keep their own name tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::format_rational;

/// Sorted `(variable, exponent)` pairs with positive exponents.
pub type Monomial = Vec<(usize, u32)>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(crate::rational::int(c))
    }

    pub fn one() -> Self {
        Poly::int(1)
    }

    pub fn var(v: usize) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(vec![(v, 1)], BigRational::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&(_, e)| e).sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms
            .keys()
            .filter_map(|m| m.iter().find(|&&(x, _)| x == v).map(|&(_, e)| e))
            .max()
            .unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.iter().map(|&(v, _)| v)).collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients of `self` as a polynomial in `v`: `out[k]` multiplies `v^k`.
    pub fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let k = m.iter().find(|&&(x, _)| x == v).map_or(0, |&(_, e)| e);
            let rest: Monomial = m.iter().copied().filter(|&(x, _)| x != v).collect();
            out[k as usize].add_term(rest, c.clone());
        }
        out
    }

    /// `Σ f_k · num^k · den^(degree - k)`: `f(num/den)` with denominators
    /// cleared to the given degree (which must be at least `degree_in(v)`).
    pub fn substitute_fraction(&self, v: usize, num: &Poly, den: &Poly, degree: u32) -> Poly {
        let coeffs = self.coefficients_in(v);
        let mut out = Poly::zero();
        for (k, f) in coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let term = &(f * &num.pow(k as u32)) * &den.pow(degree - k as u32);
            out = &out + &term;
        }
        out
    }

    /// Replaces `v` by the polynomial `value`.
    pub fn substitute(&self, v: usize, value: &Poly) -> Poly {
        self.substitute_fraction(v, value, &Poly::one(), self.degree_in(v))
    }

    pub fn evaluate(&self, values: &dyn Fn(usize) -> BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m {
                t *= num_traits::pow(values(v), e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Divides by the leading coefficient, so the zero set is unchanged and
    /// equal polynomials up to scale compare equal.
    pub fn monic(&self) -> Poly {
        match self.terms.values().next_back() {
            Some(lead) => self.scale(&(BigRational::one() / lead)),
            None => Poly::zero(),
        }
    }

    /// The largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut iter = self.terms.keys();
        let Some(first) = iter.next() else { return Vec::new() };
        let mut common: Monomial = first.clone();
        for m in iter {
            common.retain_mut(|(v, e)| match m.iter().find(|&&(x, _)| x == *v) {
                Some(&(_, f)) => {
                    *e = (*e).min(f);
                    true
                }
                None => false,
            });
        }
        common
    }

    /// Divides every term by the monomial `d` (which must divide them all).
    pub fn divide_monomial(&self, d: &Monomial) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let q: Monomial = m
                .iter()
                .filter_map(|&(v, e)| {
                    let f = d.iter().find(|&&(x, _)| x == v).map_or(0, |&(_, f)| f);
                    (e > f).then_some((v, e - f))
                })
                .collect();
            out.add_term(q, c.clone());
        }
        out
    }

    pub fn fmt_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let factors: Vec<String> = m
                .iter()
                .map(|&(v, e)| if e == 1 { name(v) } else { format!("{}^{e}", name(v)) })
                .collect();
            if factors.is_empty() {
                out.push_str(&format_rational(&mag));
            } else if mag.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&format!("{}*{}", format_rational(&mag), factors.join("*")));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&|v| format!("s{v}")))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(mono_mul(a, b), x * y);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn arithmetic_and_cancellation() {
        let x = Poly::var(0);
        let one = Poly::one();
        let p = &(&one + &x) * &(&one - &x);
        assert_eq!(p, &one - &(&x * &x));
        assert_eq!(p.total_degree(), 2);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn substitution_clears_denominators() {
        // f = x*y - 1, x = 1/y  =>  y * (1/y) - 1 = 0
        let x = Poly::var(0);
        let y = Poly::var(1);
        let f = &(&x * &y) - &Poly::one();
        let g = f.substitute_fraction(0, &Poly::one(), &y, 1);
        assert!(g.is_zero());
    }

    #[test]
    fn evaluation() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let f = &(&x * &x) + &y.scale(&int(3));
        let v = f.evaluate(&|i| if i == 0 { int(2) } else { int(5) });
        assert_eq!(v, int(19));
    }

    #[test]
    fn monomial_content_and_division() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let f = &(&(&x * &x) * &y) + &(&x * &y);
        assert_eq!(f.monomial_content(), vec![(0, 1), (1, 1)]);
        assert_eq!(f.divide_monomial(&f.monomial_content()), &x + &Poly::one());
    }

    #[test]
    fn display() {
        let x = Poly::var(0);
        let f = &(&x * &x).scale(&int(2)) - &Poly::one();
        assert_eq!(f.to_string(), "2*s0^2 - 1");
    }
}

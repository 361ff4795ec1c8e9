//! Polynomial systems, CNF encoding, flattening and hardening.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HallError;
use crate::poly::{Monomial, Poly};
use crate::rational::int;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Unknown,
    /// A generic constant with a fixed value.
    Transcendental(BigRational),
}

/// Equations `f = 0` with integer coefficients. Transcendental variables
/// act as coefficients; auxiliary unknowns carry a definition in terms of
/// earlier unknowns so assignments can be completed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    pub names: Vec<String>,
    pub kinds: Vec<VarKind>,
    pub equations: Vec<Poly>,
    pub definitions: Vec<(usize, Poly)>,
}

impl PolySystem {
    pub fn new(names: Vec<String>, equations: Vec<Poly>) -> Result<Self, HallError> {
        let sys = PolySystem { kinds: vec![VarKind::Unknown; names.len()], names, equations, definitions: Vec::new() };
        sys.check()?;
        Ok(sys)
    }

    fn check(&self) -> Result<(), HallError> {
        for (e, f) in self.equations.iter().enumerate() {
            if let Some(v) = f.variables().into_iter().find(|&v| v >= self.names.len()) {
                return Err(HallError::UnknownVariable { equation: e, variable: v });
            }
            if f.terms().any(|(_, c)| !c.is_integer()) {
                return Err(HallError::NonIntegerCoefficient(e));
            }
        }
        Ok(())
    }

    pub fn add_variable(&mut self, name: String, kind: VarKind) -> usize {
        self.names.push(name);
        self.kinds.push(kind);
        self.names.len() - 1
    }

    pub fn is_unknown(&self, v: usize) -> bool {
        self.kinds[v] == VarKind::Unknown
    }

    /// Unknowns without a definition, in index order.
    pub fn free_unknowns(&self) -> Vec<usize> {
        let defined: BTreeSet<usize> = self.definitions.iter().map(|(v, _)| *v).collect();
        (0..self.names.len()).filter(|&v| self.is_unknown(v) && !defined.contains(&v)).collect()
    }

    /// Degree of a monomial counting unknowns only.
    pub fn unknown_degree(&self, m: &Monomial) -> u32 {
        m.iter().filter(|(v, _)| self.is_unknown(*v)).map(|(_, e)| e).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.equations.iter().flat_map(|f| f.terms().map(|(m, _)| self.unknown_degree(m))).max().unwrap_or(0)
    }

    /// Values for every variable from values of the free unknowns.
    pub fn complete(&self, free: &[BigRational]) -> Result<Vec<BigRational>, HallError> {
        let vars = self.free_unknowns();
        if vars.len() != free.len() {
            return Err(HallError::AssignmentLength { expected: vars.len(), found: free.len() });
        }
        let mut values: Vec<BigRational> = self
            .kinds
            .iter()
            .map(|k| match k {
                VarKind::Transcendental(t) => t.clone(),
                VarKind::Unknown => BigRational::zero(),
            })
            .collect();
        for (v, x) in vars.iter().zip(free) {
            values[*v] = x.clone();
        }
        for (v, def) in &self.definitions {
            values[*v] = def.evaluate(&|u| values[u].clone());
        }
        Ok(values)
    }

    pub fn residuals(&self, values: &[BigRational]) -> Vec<BigRational> {
        self.equations.iter().map(|f| f.evaluate(&|v| values[v].clone())).collect()
    }

    pub fn solves(&self, values: &[BigRational]) -> bool {
        self.residuals(values).iter().all(Zero::is_zero)
    }

    /// Assignments of the free unknowns in {0,1} that solve the system,
    /// in lexicographic order.
    pub fn boolean_solutions(&self) -> Result<Vec<Vec<BigRational>>, HallError> {
        let n = self.free_unknowns().len();
        if n > 20 {
            return Err(HallError::TooManyVariables(n));
        }
        let mut out = Vec::new();
        for mask in 0..1u32 << n {
            let free: Vec<BigRational> = (0..n).map(|k| int((mask >> (n - 1 - k) & 1) as i64)).collect();
            if self.solves(&self.complete(&free)?) {
                out.push(free);
            }
        }
        Ok(out)
    }

    /// Replaces products of more than two unknowns by auxiliary unknowns
    /// `w = u·v`, each with its defining equation.
    pub fn flatten(&self) -> PolySystem {
        let mut sys = self.clone();
        let mut aux: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut k = 0;
        while let Some((e, m)) = sys
            .equations
            .iter()
            .enumerate()
            .find_map(|(e, f)| f.terms().find(|(m, _)| sys.unknown_degree(m) > 2).map(|(m, _)| (e, m.clone())))
        {
            let mut factors: Vec<usize> = Vec::new();
            for &(v, p) in &m {
                if sys.is_unknown(v) {
                    factors.extend(std::iter::repeat_n(v, p as usize));
                }
            }
            let (u, v) = (factors[0], factors[1]);
            let w = match aux.get(&(u, v)) {
                Some(&w) => w,
                None => {
                    k += 1;
                    let mut name = format!("w{k}");
                    while sys.names.contains(&name) {
                        name.push('\'');
                    }
                    let w = sys.add_variable(name, VarKind::Unknown);
                    let product = &Poly::var(u) * &Poly::var(v);
                    sys.equations.push(&Poly::var(w) - &product);
                    sys.definitions.push((w, product));
                    aux.insert((u, v), w);
                    w
                }
            };
            let target = &Poly::var(u) * &Poly::var(v);
            sys.equations[e] = replace_factor(&sys.equations[e], &m, &target, w);
        }
        sys
    }

    pub fn transcendentals(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|&v| !self.is_unknown(v)).collect()
    }
}

/// In the term with monomial `m`, replaces the factor `uv` by `w`.
fn replace_factor(f: &Poly, m: &Monomial, uv: &Poly, w: usize) -> Poly {
    let mut out = Poly::zero();
    for (mono, c) in f.terms() {
        let term = Poly::from_terms([(mono.clone(), c.clone())]);
        if mono == m {
            let (d, _) = uv.terms().next().unwrap();
            out = &out + &(&term.divide_monomial(d) * &Poly::var(w));
        } else {
            out = &out + &term;
        }
    }
    out
}

/// Boolean formula in conjunctive normal form; literals are nonzero,
/// negative for negation, variables numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub variables: usize,
    pub clauses: Vec<Vec<i64>>,
}

/// `x² − x = 0` per variable and `Π(1 − ℓ) = 0` per clause, with `¬x`
/// read as `1 − x`; an empty clause yields `1 = 0`. Flattened to degree 2.
pub fn cnf_to_polys(cnf: &Cnf) -> Result<PolySystem, HallError> {
    let names: Vec<String> = (1..=cnf.variables).map(|k| format!("x{k}")).collect();
    let mut equations = Vec::new();
    for v in 0..cnf.variables {
        let x = Poly::var(v);
        equations.push(&(&x * &x) - &x);
    }
    for clause in &cnf.clauses {
        let mut product = Poly::one();
        for &lit in clause {
            let v = lit.unsigned_abs() as usize;
            if lit == 0 || v > cnf.variables {
                return Err(HallError::BadLiteral(lit));
            }
            let x = Poly::var(v - 1);
            let factor = if lit > 0 { &Poly::one() - &x } else { x };
            product = &product * &factor;
        }
        equations.push(product);
    }
    Ok(PolySystem::new(names, equations)?.flatten())
}

/// Record of a hardening: original unknown `v` becomes `v + offsets[v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hardening {
    pub offsets: Vec<BigRational>,
    pub mixed: bool,
}

impl Hardening {
    /// Values of the hardened system's free unknowns from a complete
    /// assignment of the original system.
    pub fn transform(&self, original: &[BigRational]) -> Vec<BigRational> {
        self.offsets.iter().zip(original).map(|(o, x)| x + o).collect()
    }
}

fn random_transcendental(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i128 = loop {
        let n = rng.gen::<i64>() as i128 * 2 + rng.gen_range(0..2);
        if n != 0 {
            break n;
        }
    };
    let den: u64 = rng.gen_range(1..=1u64 << 32);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Offsets the `n`-th unknown (from 1) by `2ⁿ + 1`, scales each equation
/// by a fresh generic constant and, when `mix` is set, adds two equations
/// `y_k = Σ t_{k,m}·m` over all monomials `m` of degree ≤ 2 and mixes
/// generic multiples of them into every original equation.
pub fn harden(sys: &PolySystem, seed: u64, mix: bool) -> Result<(PolySystem, Hardening), HallError> {
    if !sys.transcendentals().is_empty() {
        return Err(HallError::AlreadyHardened);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = sys.names.len();
    let offsets: Vec<BigRational> = (1..=v).map(|n| BigRational::from_integer(BigInt::from(2).pow(n as u32)) + int(1)).collect();
    let mut out = PolySystem {
        names: sys.names.iter().map(|n| format!("{n}'")).collect(),
        kinds: vec![VarKind::Unknown; v],
        equations: Vec::new(),
        definitions: Vec::new(),
    };
    let mut t_count = 0;
    let mut fresh = |out: &mut PolySystem, rng: &mut ChaCha8Rng| -> Poly {
        t_count += 1;
        Poly::var(out.add_variable(format!("t{t_count}"), VarKind::Transcendental(random_transcendental(rng))))
    };
    let shifted: Vec<Poly> = sys
        .equations
        .iter()
        .map(|f| {
            (0..v).fold(f.clone(), |g, x| {
                if g.degree_in(x) == 0 {
                    g
                } else {
                    g.substitute(x, &(&Poly::var(x) - &Poly::constant(offsets[x].clone())))
                }
            })
        })
        .collect();
    let mut extra = Vec::new();
    if mix {
        let mut monomials: Vec<Poly> = vec![Poly::one()];
        for a in 0..v {
            monomials.push(Poly::var(a));
            for b in a..v {
                monomials.push(&Poly::var(a) * &Poly::var(b));
            }
        }
        for k in 1..=2 {
            let y = out.add_variable(format!("y{k}"), VarKind::Unknown);
            let mut q = Poly::zero();
            for m in &monomials {
                q = &q + &(&fresh(&mut out, &mut rng) * m);
            }
            extra.push(&Poly::var(y) - &q);
            out.definitions.push((y, q));
        }
    }
    for f in shifted {
        let mut g = &fresh(&mut out, &mut rng) * &f;
        for e in &extra {
            g = &g + &(&fresh(&mut out, &mut rng) * e);
        }
        out.equations.push(g);
    }
    out.equations.extend(extra);
    Ok((out, Hardening { offsets, mixed: mix }))
}

//! Exact realization over ℚ. Elements are placed one at a time: an element
//! meeting two placed ones is their cross product, otherwise it carries
//! fresh parameters. Remaining incidences become polynomial constraints,
//! solved by substitution and case splits.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::finite::{placement_order, Slot};
use super::{Joins, RealizabilityVerdict, RealizeOptions, Reduced};
use crate::lifting::BaseField;
use crate::poly::Poly;
use crate::rational::lcm_of_denominators;

type Vec3 = [Poly; 3];

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

fn dot(a: &Vec3, b: &Vec3) -> Poly {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

fn name(v: usize) -> String {
    format!("s{v}")
}

#[derive(Clone)]
struct Labeled {
    poly: Poly,
    label: String,
}

#[derive(Clone)]
struct Branch {
    points: Vec<Vec3>,
    lines: Vec<Vec3>,
    constraints: Vec<Labeled>,
    nonzero: Vec<Labeled>,
}

impl Branch {
    fn substitute(&self, v: usize, num: &Poly, den: &Poly) -> Branch {
        let vector = |w: &Vec3| -> Vec3 {
            let d = w.iter().map(|c| c.degree_in(v)).max().unwrap_or(0);
            std::array::from_fn(|k| w[k].substitute_fraction(v, num, den, d))
        };
        let each = |xs: &[Labeled]| -> Vec<Labeled> {
            xs.iter()
                .map(|x| Labeled { poly: x.poly.substitute_fraction(v, num, den, x.poly.degree_in(v)), label: x.label.clone() })
                .collect()
        };
        Branch {
            points: self.points.iter().map(vector).collect(),
            lines: self.lines.iter().map(vector).collect(),
            constraints: each(&self.constraints),
            nonzero: each(&self.nonzero),
        }
    }
}

enum Outcome {
    Realized(Vec<[BigRational; 3]>, Vec<[BigRational; 3]>),
    Dead,
    Unknown,
}

struct Solver {
    budget: u64,
    nodes: u64,
    rng: ChaCha8Rng,
    trace: Vec<String>,
    unknown: Option<String>,
}

fn build(reduced: &Reduced) -> (Branch, Vec<String>) {
    let pattern = &reduced.pattern;
    let frame = Joins::new(pattern).frame(pattern);
    let order = placement_order(pattern, &frame);
    let standard = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];
    let mut points: Vec<Option<Vec3>> = vec![None; pattern.rows()];
    let mut lines: Vec<Option<Vec3>> = vec![None; pattern.cols()];
    let mut constraints = Vec::new();
    let mut next_var = 0;
    let mut fresh = || -> Vec3 {
        next_var += 3;
        std::array::from_fn(|k| Poly::var(next_var - 3 + k))
    };
    let mut trace = vec![format!(
        "frame: points {} fixed to {}",
        frame.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", "),
        standard[..frame.len()].iter().map(|s| format!("({}:{}:{})", s[0], s[1], s[2])).collect::<Vec<_>>().join(", ")
    )];
    for (k, &i) in frame.iter().enumerate() {
        points[i] = Some(std::array::from_fn(|c| Poly::int(standard[k][c])));
    }
    for &slot in &order[frame.len()..] {
        let (placed, incident): (Vec<&Vec3>, Vec<usize>) = match slot {
            Slot::Point(i) => {
                let js: Vec<usize> = order.iter().filter_map(|s| match *s {
                    Slot::Line(j) if lines[j].is_some() && pattern.get(i, j) => Some(j),
                    _ => None,
                }).collect();
                (js.iter().map(|&j| lines[j].as_ref().unwrap()).collect(), js)
            }
            Slot::Line(j) => {
                let is: Vec<usize> = order.iter().filter_map(|s| match *s {
                    Slot::Point(i) if points[i].is_some() && pattern.get(i, j) => Some(i),
                    _ => None,
                }).collect();
                (is.iter().map(|&i| points[i].as_ref().unwrap()).collect(), is)
            }
        };
        let v = match placed.len() {
            0 => fresh(),
            1 => cross(placed[0], &fresh()),
            _ => cross(placed[0], placed[1]),
        };
        for (w, &other) in placed.iter().zip(&incident).skip(2) {
            let label = match slot {
                Slot::Point(i) => format!("point {i} on line {other}"),
                Slot::Line(j) => format!("point {other} on line {j}"),
            };
            constraints.push(Labeled { poly: dot(&v, w), label });
        }
        match slot {
            Slot::Point(i) => points[i] = Some(v),
            Slot::Line(j) => lines[j] = Some(v),
        }
    }
    let points: Vec<Vec3> = points.into_iter().map(Option::unwrap).collect();
    let lines: Vec<Vec3> = lines.into_iter().map(Option::unwrap).collect();
    let mut nonzero = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for (j, l) in lines.iter().enumerate() {
            if !pattern.get(i, j) {
                nonzero.push(Labeled { poly: dot(p, l), label: format!("point {i} off line {j}") });
            }
        }
    }
    trace.push(format!("{} parameters, {} incidence constraints", next_var, constraints.len()));
    (Branch { points, lines, constraints, nonzero }, trace)
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64().filter(|&n| n <= 1_000_000_000_000)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

fn is_homogeneous(f: &Poly) -> bool {
    let mut degrees = f.terms().map(|(m, _)| m.iter().map(|&(_, e)| e).sum::<u32>());
    let first = degrees.next();
    degrees.all(|d| Some(d) == first)
}

/// Rational roots of a univariate polynomial with nonzero constant term.
fn rational_roots(f: &Poly, v: usize) -> Option<Vec<BigRational>> {
    let coeffs: Vec<BigRational> = f.coefficients_in(v).iter().map(Poly::constant_term).collect();
    let scale = BigRational::from_integer(lcm_of_denominators(coeffs.iter()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * &scale).to_integer()).collect();
    let lows = small_divisors(&ints[0])?;
    let highs = small_divisors(ints.last().unwrap())?;
    let mut roots = BTreeSet::new();
    for p in &lows {
        for q in &highs {
            for sign in [1, -1] {
                let r = BigRational::new(p * sign, q.clone());
                if f.evaluate(&|_| r.clone()).is_zero() {
                    roots.insert(r);
                }
            }
        }
    }
    Some(roots.into_iter().collect())
}

enum Step {
    Substitute { v: usize, num: Poly, den: Poly },
    Split(Vec<(String, Branch)>),
    Stuck(String),
}

impl Solver {
    fn log(&mut self, depth: usize, text: String) {
        self.trace.push(format!("{}{}", "  ".repeat(depth), text));
    }

    fn stuck(&mut self, why: String) -> Outcome {
        self.unknown.get_or_insert(why);
        Outcome::Unknown
    }

    /// Drops satisfied constraints; `Err` describes a contradiction.
    fn simplify(b: &mut Branch) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        let mut kept = Vec::new();
        for c in b.constraints.drain(..) {
            if c.poly.is_zero() {
                continue;
            }
            if c.poly.is_constant() {
                return Err(format!("{}: requires {} = 0", c.label, c.poly));
            }
            let monic = c.poly.monic();
            if seen.insert(monic.clone()) {
                kept.push(Labeled { poly: monic, label: c.label });
            }
        }
        b.constraints = kept;
        if let Some(z) = b.nonzero.iter().find(|n| n.poly.is_zero()) {
            return Err(format!("{}: forced to vanish", z.label));
        }
        b.nonzero.retain(|n| !n.poly.is_constant());
        for (kind, vs) in [("point", &b.points), ("line", &b.lines)] {
            if let Some(i) = vs.iter().position(|w| w.iter().all(Poly::is_zero)) {
                return Err(format!("{kind} {i} degenerates to the zero vector"));
            }
        }
        Ok(())
    }

    fn plan(b: &Branch) -> Step {
        // a parameter with constant nonzero coefficient is eliminated outright
        let mut best: Option<(usize, usize, usize)> = None;
        for (k, c) in b.constraints.iter().enumerate() {
            for v in c.poly.variables() {
                if c.poly.degree_in(v) == 1 {
                    let coeff = &c.poly.coefficients_in(v)[1];
                    if coeff.is_constant() && best.is_none_or(|(_, _, t)| c.poly.term_count() < t) {
                        best = Some((k, v, c.poly.term_count()));
                    }
                }
            }
        }
        if let Some((k, v, _)) = best {
            let cs = b.constraints[k].poly.coefficients_in(v);
            return Step::Substitute { v, num: -&cs[0], den: cs[1].clone() };
        }
        for (k, c) in b.constraints.iter().enumerate() {
            let content = c.poly.monomial_content();
            if let Some(&(s, _)) = content.first() {
                let factor = vec![(s, 1)];
                let zero = b.substitute(s, &Poly::zero(), &Poly::one());
                let mut nonzero = b.clone();
                nonzero.constraints[k].poly = c.poly.divide_monomial(&factor);
                nonzero.nonzero.push(Labeled { poly: Poly::var(s), label: format!("{} != 0", name(s)) });
                return Step::Split(vec![
                    (format!("{}: case {} = 0", c.label, name(s)), zero),
                    (format!("{}: case {} != 0", c.label, name(s)), nonzero),
                ]);
            }
        }
        let mut linear: Option<(usize, usize, usize)> = None;
        for (k, c) in b.constraints.iter().enumerate() {
            for v in c.poly.variables() {
                if c.poly.degree_in(v) == 1 {
                    let size = c.poly.coefficients_in(v)[1].term_count();
                    if linear.is_none_or(|(_, _, t)| size < t) {
                        linear = Some((k, v, size));
                    }
                }
            }
        }
        if let Some((k, v, _)) = linear {
            let label = b.constraints[k].label.clone();
            let cs = b.constraints[k].poly.coefficients_in(v);
            let (d, c) = (cs[0].clone(), cs[1].clone());
            let mut solved = b.clone();
            solved.nonzero.push(Labeled { poly: c.clone(), label: format!("coefficient of {}", name(v)) });
            let solved = solved.substitute(v, &-&d, &c);
            let mut degenerate = b.clone();
            degenerate.constraints.remove(k);
            degenerate.constraints.push(Labeled { poly: c.clone(), label: format!("{label} (coefficient of {})", name(v)) });
            degenerate.constraints.push(Labeled { poly: d, label: format!("{label} (rest)") });
            return Step::Split(vec![
                (format!("{label}: solve for {} where {} != 0", name(v), c.fmt_with(&name)), solved),
                (format!("{label}: case {} = 0", c.fmt_with(&name)), degenerate),
            ]);
        }
        for c in &b.constraints {
            let vars = c.poly.variables();
            if vars.len() == 1 {
                let v = *vars.iter().next().unwrap();
                let Some(roots) = rational_roots(&c.poly, v) else {
                    return Step::Stuck(format!("coefficients too large to enumerate roots of {}", c.poly.fmt_with(&name)));
                };
                let cases = roots
                    .into_iter()
                    .map(|r| {
                        let text = format!("{}: root {} = {}", c.label, name(v), r);
                        (text, b.substitute(v, &Poly::constant(r), &Poly::one()))
                    })
                    .collect();
                return Step::Split(cases);
            }
        }
        for c in &b.constraints {
            let vars: Vec<usize> = c.poly.variables().into_iter().collect();
            if vars.len() == 2 && is_homogeneous(&c.poly) {
                let (a, v) = (vars[0], vars[1]);
                let dehomogenized = c.poly.substitute(v, &Poly::one());
                let Some(roots) = rational_roots(&dehomogenized, a) else {
                    return Step::Stuck(format!("coefficients too large to enumerate roots of {}", c.poly.fmt_with(&name)));
                };
                let mut cases = vec![(format!("{}: case {} = 0", c.label, name(v)), b.substitute(v, &Poly::zero(), &Poly::one()))];
                for r in roots {
                    let mut child = b.clone();
                    child.nonzero.push(Labeled { poly: Poly::var(v), label: format!("{} != 0", name(v)) });
                    let child = child.substitute(a, &Poly::var(v).scale(&r), &Poly::one());
                    cases.push((format!("{}: case {} = {} {}", c.label, name(a), r, name(v)), child));
                }
                if cases.len() == 1 {
                    cases[0].0.push_str(&format!(" (no rational ratio {}:{} otherwise)", name(a), name(v)));
                }
                return Step::Split(cases);
            }
        }
        let c = &b.constraints[0];
        Step::Stuck(format!("{}: {} = 0 is not linear in any parameter", c.label, c.poly.fmt_with(&name)))
    }

    fn solve(&mut self, mut b: Branch, depth: usize) -> Outcome {
        loop {
            self.nodes += 1;
            if self.nodes > self.budget {
                return self.stuck(format!("search budget of {} nodes exhausted", self.budget));
            }
            if let Err(why) = Self::simplify(&mut b) {
                self.log(depth, format!("contradiction: {why}"));
                return Outcome::Dead;
            }
            if b.constraints.is_empty() {
                return self.sample(&b);
            }
            match Self::plan(&b) {
                Step::Substitute { v, num, den } => b = b.substitute(v, &num, &den),
                Step::Stuck(why) => return self.stuck(why),
                Step::Split(cases) => {
                    if cases.is_empty() {
                        self.log(depth, "contradiction: no rational root".to_string());
                        return Outcome::Dead;
                    }
                    let mut unknown = false;
                    for (text, child) in cases {
                        self.log(depth, text);
                        match self.solve(child, depth + 1) {
                            Outcome::Dead => {}
                            Outcome::Unknown => unknown = true,
                            found => return found,
                        }
                    }
                    return if unknown { Outcome::Unknown } else { Outcome::Dead };
                }
            }
        }
    }

    /// All constraints hold identically: pick parameter values avoiding
    /// the finitely many forbidden hypersurfaces.
    fn sample(&mut self, b: &Branch) -> Outcome {
        let vars: BTreeSet<usize> = b.points.iter().chain(&b.lines).flatten().flat_map(Poly::variables).collect();
        let max_var = vars.iter().next_back().map_or(0, |v| v + 1);
        for attempt in 0..400u32 {
            let bound = [3i64, 30, 3000, 1 << 40][(attempt / 100) as usize];
            let values: Vec<BigRational> = (0..max_var)
                .map(|_| BigRational::from_integer(BigInt::from(self.rng.gen_range(-bound..=bound))))
                .collect();
            let at = |v: usize| values[v].clone();
            if b.nonzero.iter().any(|n| n.poly.evaluate(&at).is_zero()) {
                continue;
            }
            let eval = |w: &Vec3| -> [BigRational; 3] { std::array::from_fn(|k| w[k].evaluate(&at)) };
            let points: Vec<[BigRational; 3]> = b.points.iter().map(eval).collect();
            let lines: Vec<[BigRational; 3]> = b.lines.iter().map(eval).collect();
            if points.iter().chain(&lines).any(|w| w.iter().all(Zero::is_zero)) {
                continue;
            }
            return Outcome::Realized(points.into_iter().map(primitive).collect(), lines.into_iter().map(primitive).collect());
        }
        self.stuck("no admissible parameter values found".to_string())
    }
}

/// Scales a nonzero vector to coprime integers.
fn primitive(v: [BigRational; 3]) -> [BigRational; 3] {
    let l = BigRational::from_integer(lcm_of_denominators(v.iter()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    std::array::from_fn(|k| BigRational::from_integer(&ints[k] / &g))
}

pub(super) fn realize(reduced: &Reduced, options: &RealizeOptions) -> RealizabilityVerdict {
    let (branch, trace) = build(reduced);
    let mut solver = Solver {
        budget: options.budget,
        nodes: 0,
        rng: ChaCha8Rng::seed_from_u64(options.seed),
        trace,
        unknown: None,
    };
    match solver.solve(branch, 0) {
        Outcome::Realized(points, lines) => RealizabilityVerdict::Realized(reduced.expand_exact(BaseField::Rational, points, lines)),
        Outcome::Dead => RealizabilityVerdict::ProvedInfeasible(solver.trace),
        Outcome::Unknown => RealizabilityVerdict::Unknown(solver.unknown.unwrap_or_default()),
    }
}

//! Compilation of a polynomial system into an incidence pattern, and
//! checking a solution against it.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gadget::{ElementId, ElementKind, GadgetProgram};
use super::system::{harden, Hardening, PolySystem, VarKind};
use super::HallError;
use crate::lifting::{incidences_over_rationals, BaseField, Configuration, IncidencePattern, MismatchKind};
use crate::poly::{Monomial, Poly};

const WITNESS_ATTEMPTS: usize = 3;

/// A compiled system: the pattern over all constructed points (rows) and
/// lines (columns), the program that builds them and the system it encodes.
#[derive(Clone, Debug)]
pub struct CompiledPattern {
    pub pattern: IncidencePattern,
    pub point_names: Vec<String>,
    pub line_names: Vec<String>,
    /// Originating equation or term of each row, then each column.
    pub point_origins: Vec<String>,
    pub line_origins: Vec<String>,
    pub point_steps: Vec<ElementId>,
    pub line_steps: Vec<ElementId>,
    pub program: GadgetProgram,
    /// The system actually compiled (after hardening, if any).
    pub system: PolySystem,
    pub hardening: Option<Hardening>,
    /// Incidences imposed by the equations rather than found at witnesses,
    /// as (row, column).
    pub asserted: Vec<(usize, usize)>,
}

impl CompiledPattern {
    pub fn label(&self) -> &'static str {
        match &self.hardening {
            Some(h) if h.mixed => "hardened",
            Some(_) => "unhardened",
            None => "raw",
        }
    }

    pub fn element_count(&self) -> usize {
        self.point_names.len() + self.line_names.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionVerdict {
    Accept,
    Reject(String),
}

/// Hardens (with or without mixing in the two extra equations) and
/// compiles.
pub fn reduce(sys: &PolySystem, seed: u64, mix: bool) -> Result<CompiledPattern, HallError> {
    let flat = sys.flatten();
    let (hardened, hardening) = harden(&flat, seed, mix)?;
    let mut compiled = compile_system(&hardened, seed ^ 0x5851_F42D_4C95_7F2D)?;
    compiled.hardening = Some(hardening);
    Ok(compiled)
}

/// Splits a monomial into its transcendental and unknown parts.
fn split(sys: &PolySystem, m: &Monomial) -> (Monomial, Monomial) {
    m.iter().partition(|(v, _)| !sys.is_unknown(*v))
}

fn monomial_name(sys: &PolySystem, m: &Monomial) -> String {
    if m.is_empty() {
        return "1".to_string();
    }
    m.iter()
        .map(|(v, e)| if *e == 1 { sys.names[*v].clone() } else { format!("{}^{e}", sys.names[*v]) })
        .collect::<Vec<_>>()
        .join("*")
}

struct Compiler<'a> {
    sys: &'a PolySystem,
    program: GadgetProgram,
}

impl Compiler<'_> {
    fn variable(&mut self, v: usize) -> ElementId {
        self.program.variable(v, &self.sys.names[v])
    }

    /// Product of the variables of a monomial, left to right.
    fn product(&mut self, start: Option<ElementId>, m: &Monomial) -> Result<Option<ElementId>, HallError> {
        let mut acc = start;
        for &(v, e) in m {
            for _ in 0..e {
                let p = self.variable(v);
                acc = Some(match acc {
                    None => p,
                    Some(a) => self.program.compile_multiplication(a, p)?,
                });
            }
        }
        Ok(acc)
    }

    /// A coefficient polynomial in the transcendentals: each monomial is
    /// built, scaled by its integer, and the results summed in order.
    fn coefficient(&mut self, c: &Poly) -> Result<Option<ElementId>, HallError> {
        if *c == Poly::one() {
            return Ok(None);
        }
        if let Some(p) = self.program.diagonal_point(c) {
            return Ok(Some(p));
        }
        let mut acc: Option<ElementId> = None;
        for (m, k) in c.terms() {
            let base = self.product(None, m)?.unwrap_or(self.program.frame.i);
            let term = self.program.integer_multiple(base, k.numer())?;
            acc = Some(match acc {
                None => term,
                Some(a) => self.program.compile_addition(a, term)?,
            });
        }
        Ok(acc)
    }

    /// Builds the terms of equation `e` and returns the asserted
    /// (point, line) incidences.
    fn equation(&mut self, e: usize, f: &Poly) -> Result<Vec<(ElementId, ElementId)>, HallError> {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, BigRational)>> = BTreeMap::new();
        for (m, c) in f.terms() {
            let degree = self.sys.unknown_degree(m);
            if degree > 2 {
                return Err(HallError::DegreeTooHigh { equation: e, degree });
            }
            let (t, u) = split(self.sys, m);
            groups.entry(u).or_default().push((t, c.clone()));
        }
        let mut terms = Vec::with_capacity(groups.len());
        for (u, coefficient) in groups {
            self.program.set_origin(format!("equation {}: term {}", e + 1, monomial_name(self.sys, &u)));
            let c = Poly::from_terms(coefficient);
            let start = self.coefficient(&c)?;
            let t = self.product(start, &u)?.unwrap_or(self.program.frame.i);
            terms.push(t);
        }
        self.program.set_origin(format!("equation {}: sum", e + 1));
        let frame = self.program.frame;
        let Some((&last, rest)) = terms.split_last() else {
            return Ok(Vec::new());
        };
        let Some((&first, middle)) = rest.split_first() else {
            return Ok(vec![(last, frame.ox), (last, frame.oy)]);
        };
        let mut partial = first;
        for &t in middle {
            partial = self.program.compile_addition(partial, t)?;
        }
        // (P + T, T) lies on the y-axis exactly when P + T = 0.
        self.program.set_origin(format!("equation {}: assertion", e + 1));
        let z = self.program.sum_point(partial, last)?;
        Ok(vec![(z, frame.oy)])
    }
}

/// Emits the frame and the gadgets of every equation, then records the
/// incidences that hold at two random witnesses plus the asserted ones.
pub fn compile_system(sys: &PolySystem, seed: u64) -> Result<CompiledPattern, HallError> {
    let mut compiler = Compiler { sys, program: GadgetProgram::new() };
    let mut asserted_steps = Vec::new();
    for (e, f) in sys.equations.iter().enumerate() {
        asserted_steps.extend(compiler.equation(e, f)?);
    }
    let program = compiler.program;
    let (point_steps, line_steps): (Vec<ElementId>, Vec<ElementId>) = {
        let mut p = Vec::new();
        let mut l = Vec::new();
        for (k, s) in program.steps().iter().enumerate() {
            match s.kind {
                ElementKind::Point => p.push(ElementId(k)),
                ElementKind::Line => l.push(ElementId(k)),
            }
        }
        (p, l)
    };
    let row_of: BTreeMap<ElementId, usize> = point_steps.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let col_of: BTreeMap<ElementId, usize> = line_steps.iter().enumerate().map(|(j, s)| (*s, j)).collect();
    let asserted: BTreeSet<(usize, usize)> = asserted_steps.iter().map(|(p, l)| (row_of[p], col_of[l])).collect();

    let sets = witness_incidences(sys, &program, &point_steps, &line_steps, seed)?;
    let mut ones = vec![false; point_steps.len() * line_steps.len()];
    for (i, on) in sets.iter().enumerate() {
        for &j in on {
            ones[i * line_steps.len() + j] = true;
        }
    }
    for &(i, j) in &asserted {
        ones[i * line_steps.len() + j] = true;
    }
    let pattern = IncidencePattern::new(point_steps.len(), line_steps.len(), ones).expect("the frame is nonempty");
    let name = |s: &ElementId| program.step(*s).name.clone();
    let origin = |s: &ElementId| program.step(*s).origin.clone();
    Ok(CompiledPattern {
        pattern,
        point_names: point_steps.iter().map(name).collect(),
        line_names: line_steps.iter().map(name).collect(),
        point_origins: point_steps.iter().map(origin).collect(),
        line_origins: line_steps.iter().map(origin).collect(),
        point_steps,
        line_steps,
        program,
        system: sys.clone(),
        hardening: None,
        asserted: asserted.into_iter().collect(),
    })
}

fn random_value(rng: &mut ChaCha8Rng) -> BigRational {
    let num = BigInt::from(rng.gen::<u64>()) * if rng.gen::<bool>() { 1 } else { -1 };
    let den = BigInt::from(rng.gen_range(1..=1u64 << 32));
    BigRational::new(num, den)
}

fn coordinates(
    program: &GadgetProgram,
    values: &[BigRational],
    point_steps: &[ElementId],
    line_steps: &[ElementId],
) -> Result<(Vec<[BigRational; 3]>, Vec<[BigRational; 3]>), HallError> {
    let all = program.evaluate(values)?;
    Ok((point_steps.iter().map(|s| all[s.0].clone()).collect(), line_steps.iter().map(|s| all[s.0].clone()).collect()))
}

fn witness_incidences(
    sys: &PolySystem,
    program: &GadgetProgram,
    point_steps: &[ElementId],
    line_steps: &[ElementId],
    seed: u64,
) -> Result<Vec<Vec<usize>>, HallError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = HallError::Degenerate("no witness drawn".to_string());
    for _ in 0..WITNESS_ATTEMPTS {
        let mut draw = || -> Result<Vec<Vec<usize>>, HallError> {
            let values: Vec<BigRational> = sys
                .kinds
                .iter()
                .map(|k| match k {
                    VarKind::Unknown => random_value(&mut rng),
                    VarKind::Transcendental(t) => t.clone(),
                })
                .collect();
            let (points, lines) = coordinates(program, &values, point_steps, line_steps)?;
            incidences_over_rationals(&points, &lines).map_err(|m| HallError::Degenerate(format!("{m}")))
        };
        let (a, b) = match (draw(), draw()) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                last = e;
                continue;
            }
        };
        match a.iter().zip(&b).enumerate().find(|(_, (x, y))| x != y) {
            None => return Ok(a),
            Some((i, (x, y))) => {
                let j = *x.iter().chain(y).find(|j| x.contains(j) != y.contains(j)).expect("sets differ");
                last = HallError::WitnessDisagreement {
                    point: program.step(point_steps[i]).name.clone(),
                    line: program.step(line_steps[j]).name.clone(),
                };
            }
        }
    }
    Err(last)
}

/// Evaluates the construction at a solution of the original system and
/// checks that it realizes the compiled pattern exactly. `free` assigns
/// the free unknowns of `original`.
pub fn verify_reduction(
    original: &PolySystem,
    free: &[BigRational],
    compiled: &CompiledPattern,
) -> Result<ReductionVerdict, HallError> {
    let full = original.flatten().complete(free)?;
    let compiled_free = match &compiled.hardening {
        Some(h) => h.transform(&full),
        None => compiled.system.free_unknowns().iter().map(|&v| full[v].clone()).collect(),
    };
    let values = compiled.system.complete(&compiled_free)?;
    let (points, lines) = match coordinates(&compiled.program, &values, &compiled.point_steps, &compiled.line_steps) {
        Ok(c) => c,
        Err(HallError::Degenerate(step)) => return Ok(ReductionVerdict::Reject(format!("{step} degenerates to the zero vector"))),
        Err(e) => return Err(e),
    };
    let config = Configuration::Exact { field: BaseField::Rational, points, lines };
    if let Err(m) = config.verify(&compiled.pattern) {
        let (p, l) = (&compiled.point_names[m.row], &compiled.line_names[m.col]);
        let reason = match m.kind {
            MismatchKind::MissingIncidence => format!("point {p} misses line {l}"),
            MismatchKind::ExtraIncidence => format!("point {p} falls on line {l}"),
            MismatchKind::ZeroPoint => format!("point {p} is the zero vector"),
            MismatchKind::ZeroLine => format!("line {l} is the zero vector"),
        };
        return Ok(ReductionVerdict::Reject(reason));
    }
    if let Some(e) = original.residuals(&full).iter().position(|r| !r.is_zero()) {
        return Ok(ReductionVerdict::Reject(format!("equation {} is not satisfied", e + 1)));
    }
    Ok(ReductionVerdict::Accept)
}

//! Ruler constructions for sums and products of coordinates on the line
//! `y = x`, relative to the frame X, Y, O, I.

use std::collections::HashMap;

use num_rational::BigRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::HallError;
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Point,
    Line,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    /// Fixed homogeneous coordinates.
    Fixed([i64; 3]),
    /// The point `(s, s)` for the value of variable `s`.
    Diagonal(usize),
    /// Intersection of two lines.
    Meet(ElementId, ElementId),
    /// Line through two points.
    Join(ElementId, ElementId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub kind: ElementKind,
    pub construction: Construction,
    pub name: String,
    pub origin: String,
}

/// Frame elements, created as the first eight steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    pub x: ElementId,
    pub y: ElementId,
    pub o: ElementId,
    pub i: ElementId,
    pub ox: ElementId,
    pub oy: ElementId,
    pub oi: ElementId,
    pub xy: ElementId,
}

/// A straight-line program of points and lines. Points on `y = x` are
/// tracked with their value as a polynomial in the variables and reused.
#[derive(Clone, Debug)]
pub struct GadgetProgram {
    steps: Vec<Step>,
    cache: HashMap<Construction, ElementId>,
    diagonal: HashMap<Poly, ElementId>,
    value: HashMap<ElementId, Poly>,
    pub frame: Frame,
    slope_one: Option<ElementId>,
    minus_one: Option<ElementId>,
    origin: String,
    names: HashMap<usize, String>,
}

fn fmt_value(v: &Poly, names: &dyn Fn(usize) -> String) -> String {
    v.fmt_with(names)
}

impl GadgetProgram {
    pub fn new() -> Self {
        let mut p = GadgetProgram {
            steps: Vec::new(),
            cache: HashMap::new(),
            diagonal: HashMap::new(),
            value: HashMap::new(),
            frame: Frame {
                x: ElementId(0),
                y: ElementId(0),
                o: ElementId(0),
                i: ElementId(0),
                ox: ElementId(0),
                oy: ElementId(0),
                oi: ElementId(0),
                xy: ElementId(0),
            },
            slope_one: None,
            minus_one: None,
            origin: "frame".to_string(),
            names: HashMap::new(),
        };
        let x = p.push(ElementKind::Point, Construction::Fixed([1, 0, 0]), "X");
        let y = p.push(ElementKind::Point, Construction::Fixed([0, 1, 0]), "Y");
        let o = p.push(ElementKind::Point, Construction::Fixed([0, 0, 1]), "O");
        let i = p.push(ElementKind::Point, Construction::Fixed([1, 1, 1]), "I");
        let ox = p.join(o, x, "OX");
        let oy = p.join(o, y, "OY");
        let oi = p.join(o, i, "OI");
        let xy = p.join(x, y, "XY");
        p.frame = Frame { x, y, o, i, ox, oy, oi, xy };
        p.register(o, Poly::zero());
        p.register(i, Poly::one());
        p
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn step(&self, id: ElementId) -> &Step {
        &self.steps[id.0]
    }

    pub fn set_origin(&mut self, origin: impl Into<String>) {
        self.origin = origin.into();
    }

    /// Value of a point on `y = x`, if it was built as one.
    pub fn value_of(&self, id: ElementId) -> Option<&Poly> {
        self.value.get(&id)
    }

    fn push(&mut self, kind: ElementKind, construction: Construction, name: &str) -> ElementId {
        if let Some(&id) = self.cache.get(&construction) {
            return id;
        }
        let id = ElementId(self.steps.len());
        self.steps.push(Step { kind, construction: construction.clone(), name: name.to_string(), origin: self.origin.clone() });
        self.cache.insert(construction, id);
        id
    }

    fn key_pair(a: ElementId, b: ElementId) -> (ElementId, ElementId) {
        if a <= b { (a, b) } else { (b, a) }
    }

    fn join(&mut self, a: ElementId, b: ElementId, name: &str) -> ElementId {
        let (a, b) = Self::key_pair(a, b);
        self.push(ElementKind::Line, Construction::Join(a, b), name)
    }

    fn meet(&mut self, a: ElementId, b: ElementId, name: &str) -> ElementId {
        let (a, b) = Self::key_pair(a, b);
        self.push(ElementKind::Point, Construction::Meet(a, b), name)
    }

    fn alias(&mut self, construction: Construction, id: ElementId) {
        self.cache.entry(construction).or_insert(id);
    }

    fn register(&mut self, id: ElementId, v: Poly) {
        self.diagonal.entry(v.clone()).or_insert(id);
        self.value.entry(id).or_insert(v);
    }

    fn name_of(&self, v: &Poly) -> String {
        fmt_value(v, &|k| self.names.get(&k).cloned().unwrap_or_else(|| format!("v{k}")))
    }

    /// The diagonal point of a variable, free on `y = x`.
    pub fn variable(&mut self, var: usize, name: &str) -> ElementId {
        self.names.entry(var).or_insert_with(|| name.to_string());
        let v = Poly::var(var);
        if let Some(&id) = self.diagonal.get(&v) {
            return id;
        }
        let id = self.push(ElementKind::Point, Construction::Diagonal(var), &format!("({name},{name})"));
        self.register(id, v);
        id
    }

    pub fn diagonal_point(&self, v: &Poly) -> Option<ElementId> {
        self.diagonal.get(v).copied()
    }

    fn value(&self, id: ElementId) -> Result<Poly, HallError> {
        self.value.get(&id).cloned().ok_or_else(|| HallError::NotDiagonal(self.steps[id.0].name.clone()))
    }

    /// The point `(1:1:0)` at infinity, direction of slope one.
    fn slope_one(&mut self) -> ElementId {
        if let Some(u) = self.slope_one {
            return u;
        }
        let (oi, xy) = (self.frame.oi, self.frame.xy);
        let u = self.meet(oi, xy, "U");
        self.slope_one = Some(u);
        u
    }

    /// `x = a`.
    fn vertical(&mut self, a: ElementId) -> ElementId {
        let name = format!("x={}", self.steps[a.0].name_value());
        let y = self.frame.y;
        self.join(a, y, &name)
    }

    /// `y = a`.
    fn horizontal(&mut self, a: ElementId) -> ElementId {
        let name = format!("y={}", self.steps[a.0].name_value());
        let x = self.frame.x;
        self.join(a, x, &name)
    }

    /// Lines `x=a`, `x=y+a`, `y=b`, `x=a+b`, points `(a,0)`, `(a+b,b)` and
    /// the result `(a+b,a+b)`.
    pub fn compile_addition(&mut self, a: ElementId, b: ElementId) -> Result<ElementId, HallError> {
        let sum = &self.value(a)? + &self.value(b)?;
        let s = self.sum_point(a, b)?;
        Ok(self.finish_vertical(s, sum))
    }

    /// The point `(a+b, b)` of the addition gadget, without the final
    /// vertical.
    pub fn sum_point(&mut self, a: ElementId, b: ElementId) -> Result<ElementId, HallError> {
        let (va, vb) = (self.value(a)?, self.value(b)?);
        let sum = &va + &vb;
        let (na, nb, ns) = (self.name_of(&va), self.name_of(&vb), self.name_of(&sum));
        let xa = self.vertical(a);
        let ox = self.frame.ox;
        let a0 = self.meet(xa, ox, &format!("({na},0)"));
        let u = self.slope_one();
        let slope = self.join(a0, u, &format!("x=y+{na}"));
        let yb = self.horizontal(b);
        Ok(self.meet(slope, yb, &format!("({ns},{nb})")))
    }

    /// `x = value` through `s`, then its meet with `y = x`.
    fn finish_vertical(&mut self, s: ElementId, value: Poly) -> ElementId {
        let y = self.frame.y;
        if let Some(existing) = self.diagonal_point(&value) {
            let line = self.vertical(existing);
            self.alias(Construction::Join(Self::key_pair(s, y).0, Self::key_pair(s, y).1), line);
            return existing;
        }
        let name = self.name_of(&value);
        let line = self.join(s, y, &format!("x={name}"));
        let oi = self.frame.oi;
        let r = self.meet(line, oi, &format!("({name},{name})"));
        let (p, q) = Self::key_pair(r, y);
        self.alias(Construction::Join(p, q), line);
        self.register(r, value);
        r
    }

    /// Lines `x=1`, `y=a`, `y=ax`, `x=b`, `y=ab`, points `(1,a)`, `(b,ab)`
    /// and the result `(ab,ab)`.
    pub fn compile_multiplication(&mut self, a: ElementId, b: ElementId) -> Result<ElementId, HallError> {
        let (va, vb) = (self.value(a)?, self.value(b)?);
        let product = &va * &vb;
        let (na, nb, np) = (self.name_of(&va), self.name_of(&vb), self.name_of(&product));
        let i = self.frame.i;
        let x1 = self.vertical(i);
        let ya = self.horizontal(a);
        let p1a = self.meet(x1, ya, &format!("(1,{na})"));
        let o = self.frame.o;
        let slope = self.join(o, p1a, &format!("y={na}x"));
        let xb = self.vertical(b);
        let q = self.meet(xb, slope, &format!("({nb},{np})"));
        let x = self.frame.x;
        if let Some(existing) = self.diagonal_point(&product) {
            let line = self.horizontal(existing);
            let (p, r) = Self::key_pair(q, x);
            self.alias(Construction::Join(p, r), line);
            return Ok(existing);
        }
        let line = self.join(q, x, &format!("y={np}"));
        let oi = self.frame.oi;
        let r = self.meet(line, oi, &format!("({np},{np})"));
        let (p, s) = Self::key_pair(r, x);
        self.alias(Construction::Join(p, s), line);
        self.register(r, product);
        Ok(r)
    }

    /// The point `(-1,-1)`: through `(0,1)` with slope one to `(-1,0)`,
    /// then vertically to `y = x`.
    pub fn minus_one(&mut self) -> ElementId {
        if let Some(m) = self.minus_one {
            return m;
        }
        let (i, oy, ox) = (self.frame.i, self.frame.oy, self.frame.ox);
        let y1 = self.horizontal(i);
        let p01 = self.meet(oy, y1, "(0,1)");
        let u = self.slope_one();
        let slope = self.join(p01, u, "x=y-1");
        let m0 = self.meet(slope, ox, "(-1,0)");
        let m = self.finish_vertical(m0, -&Poly::one());
        self.minus_one = Some(m);
        m
    }

    /// `k·e`: doublings of `e`, summed from the lowest set bit, negated by
    /// multiplication with −1.
    pub fn integer_multiple(&mut self, e: ElementId, k: &BigInt) -> Result<ElementId, HallError> {
        if k.is_zero() {
            return Ok(self.frame.o);
        }
        let mut power = e;
        let mut acc: Option<ElementId> = None;
        let magnitude = k.abs();
        let bits = magnitude.bits();
        for bit in 0..bits {
            if magnitude.bit(bit) {
                acc = Some(match acc {
                    None => power,
                    Some(a) => self.compile_addition(a, power)?,
                });
            }
            if bit + 1 < bits {
                power = self.compile_addition(power, power)?;
            }
        }
        let acc = acc.expect("nonzero multiple");
        if k.is_negative() {
            let m = self.minus_one();
            return self.compile_multiplication(m, acc);
        }
        Ok(acc)
    }

    /// Number of points and lines.
    pub fn counts(&self) -> (usize, usize) {
        let points = self.steps.iter().filter(|s| s.kind == ElementKind::Point).count();
        (points, self.steps.len() - points)
    }

    /// Primitive integer coordinates of every step for the given
    /// variable values.
    pub fn evaluate(&self, values: &[BigRational]) -> Result<Vec<[BigRational; 3]>, HallError> {
        let mut coords: Vec<[BigInt; 3]> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let c = match &step.construction {
                Construction::Fixed(v) => v.map(BigInt::from),
                Construction::Diagonal(s) => {
                    let (n, d) = (values[*s].numer().clone(), values[*s].denom().clone());
                    [n.clone(), n, d]
                }
                Construction::Meet(a, b) | Construction::Join(a, b) => cross(&coords[a.0], &coords[b.0]),
            };
            let c = primitive(c).ok_or_else(|| HallError::Degenerate(step.name.clone()))?;
            coords.push(c);
        }
        Ok(coords.into_iter().map(|c| c.map(BigRational::from_integer)).collect())
    }
}

impl Default for GadgetProgram {
    fn default() -> Self {
        Self::new()
    }
}

impl Step {
    /// The value inside a diagonal point's name `(v,v)`.
    fn name_value(&self) -> String {
        match self.name.as_str() {
            "O" => "0".to_string(),
            "I" => "1".to_string(),
            n => n.trim_start_matches('(').split(',').next().unwrap_or(n).to_string(),
        }
    }
}

fn cross(a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// Divides out the content and makes the last nonzero coordinate positive.
fn primitive(v: [BigInt; 3]) -> Option<[BigInt; 3]> {
    let last = v.iter().rev().find(|c| !c.is_zero())?;
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let g = if last.is_negative() { -g } else { g };
    if g.is_one() {
        return Some(v);
    }
    Some(v.map(|c| c / &g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn affine(c: &[BigRational; 3]) -> (BigRational, BigRational) {
        (&c[0] / &c[2], &c[1] / &c[2])
    }

    fn points(p: &GadgetProgram, coords: &[[BigRational; 3]], from: usize) -> Vec<(i64, i64)> {
        p.steps()
            .iter()
            .enumerate()
            .skip(from)
            .filter(|(_, s)| s.kind == ElementKind::Point)
            .filter(|(k, _)| !coords[*k][2].is_zero())
            .map(|(k, _)| {
                let (x, y) = affine(&coords[k]);
                (x.to_integer().try_into().unwrap(), y.to_integer().try_into().unwrap())
            })
            .collect()
    }

    #[test]
    fn frame_is_eight_steps() {
        let p = GadgetProgram::new();
        assert_eq!(p.counts(), (4, 4));
    }

    #[test]
    fn addition_of_three_and_five() {
        let mut p = GadgetProgram::new();
        let a = p.variable(0, "a");
        let b = p.variable(1, "b");
        let before = p.steps().len();
        let r = p.compile_addition(a, b).unwrap();
        let coords = p.evaluate(&[int(3), int(5)]).unwrap();
        assert_eq!(affine(&coords[r.0]), (int(8), int(8)));
        assert_eq!(points(&p, &coords, before), vec![(3, 0), (8, 5), (8, 8)]);
        // lines x=3, x=y+3, y=5, x=8
        let lines: Vec<[BigRational; 3]> = p.steps().iter().enumerate().skip(before).filter(|(_, s)| s.kind == ElementKind::Line).map(|(k, _)| coords[k].clone()).collect();
        let expect = [[1, 0, -3], [1, -1, -3], [0, 1, -5], [1, 0, -8]];
        for (l, e) in lines.iter().zip(expect) {
            let e: [BigRational; 3] = std::array::from_fn(|k| int(e[k]));
            let scale = &l[2] / &e[2];
            assert_eq!(*l, std::array::from_fn(|k| &e[k] * &scale));
        }
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn multiplication_of_three_and_five() {
        let mut p = GadgetProgram::new();
        let a = p.variable(0, "a");
        let b = p.variable(1, "b");
        let before = p.steps().len();
        let r = p.compile_multiplication(a, b).unwrap();
        let coords = p.evaluate(&[int(3), int(5)]).unwrap();
        assert_eq!(affine(&coords[r.0]), (int(15), int(15)));
        assert_eq!(points(&p, &coords, before), vec![(1, 3), (5, 15), (15, 15)]);
        let lines = p.steps().iter().skip(before).filter(|s| s.kind == ElementKind::Line).count();
        assert_eq!(lines, 5);
    }

    #[test]
    fn degenerate_operands_reuse_the_frame() {
        let mut p = GadgetProgram::new();
        let (o, i) = (p.frame.o, p.frame.i);
        assert_eq!(p.compile_addition(o, o).unwrap(), o);
        assert_eq!(p.compile_addition(i, o).unwrap(), i);
        let b = p.variable(0, "b");
        assert_eq!(p.compile_multiplication(i, b).unwrap(), b);
        assert_eq!(p.compile_multiplication(o, b).unwrap(), o);
        assert!(p.evaluate(&[int(7)]).is_ok());
    }

    #[test]
    fn minus_one_and_multiples() {
        let mut p = GadgetProgram::new();
        let m = p.minus_one();
        let t = p.variable(0, "t");
        let r = p.integer_multiple(t, &(-13).into()).unwrap();
        let coords = p.evaluate(&[int(2)]).unwrap();
        assert_eq!(affine(&coords[m.0]), (int(-1), int(-1)));
        assert_eq!(affine(&coords[r.0]), (int(-26), int(-26)));
        // -1 + 1 lands on the y-axis
        let s = p.compile_addition(m, p.frame.i).unwrap();
        assert_eq!(s, p.frame.o);
    }
}

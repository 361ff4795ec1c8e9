//! Exhaustive search over the points and lines of PG(2,p).

use num_rational::BigRational;

use super::{Joins, RealizabilityVerdict, RealizeOptions, Reduced};
use crate::geometry::ProjectivePlane;
use crate::lifting::BaseField;
use crate::rational::int;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(super) enum Slot {
    Point(usize),
    Line(usize),
}

struct Search<'a> {
    plane: &'a ProjectivePlane,
    pattern: &'a crate::lifting::IncidencePattern,
    on_line: Vec<Vec<usize>>,
    through_point: Vec<Vec<usize>>,
    order: Vec<Slot>,
    point_at: Vec<Option<usize>>,
    line_at: Vec<Option<usize>>,
    nodes: u64,
    budget: u64,
}

enum Outcome {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    fn candidates(&self, slot: Slot) -> Vec<usize> {
        let n = self.plane.size();
        match slot {
            Slot::Point(i) => {
                let anchor = (0..self.pattern.cols()).find(|&j| self.pattern.get(i, j) && self.line_at[j].is_some());
                match anchor {
                    Some(j) => self.on_line[self.line_at[j].unwrap()].clone(),
                    None => (0..n).collect(),
                }
            }
            Slot::Line(j) => {
                let anchor = (0..self.pattern.rows()).find(|&i| self.pattern.get(i, j) && self.point_at[i].is_some());
                match anchor {
                    Some(i) => self.through_point[self.point_at[i].unwrap()].clone(),
                    None => (0..n).collect(),
                }
            }
        }
    }

    fn consistent(&self, slot: Slot, value: usize) -> bool {
        match slot {
            Slot::Point(i) => {
                (0..self.pattern.cols()).all(|j| self.line_at[j].is_none_or(|l| self.plane.incident(value, l) == self.pattern.get(i, j)))
                    && self.point_at.iter().all(|&q| q != Some(value))
            }
            Slot::Line(j) => {
                (0..self.pattern.rows()).all(|i| self.point_at[i].is_none_or(|q| self.plane.incident(q, value) == self.pattern.get(i, j)))
                    && self.line_at.iter().all(|&l| l != Some(value))
            }
        }
    }

    fn set(&mut self, slot: Slot, value: Option<usize>) {
        match slot {
            Slot::Point(i) => self.point_at[i] = value,
            Slot::Line(j) => self.line_at[j] = value,
        }
    }

    fn run(&mut self, depth: usize) -> Outcome {
        if depth == self.order.len() {
            return Outcome::Found;
        }
        let slot = self.order[depth];
        for value in self.candidates(slot) {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Outcome::OutOfBudget;
            }
            if !self.consistent(slot, value) {
                continue;
            }
            self.set(slot, Some(value));
            match self.run(depth + 1) {
                Outcome::Exhausted => {}
                other => return other,
            }
            self.set(slot, None);
        }
        Outcome::Exhausted
    }
}

/// Greedy order: repeatedly take the element with the most incidences to
/// elements already ordered.
pub(super) fn placement_order(pattern: &crate::lifting::IncidencePattern, fixed: &[usize]) -> Vec<Slot> {
    let (r, c) = (pattern.rows(), pattern.cols());
    let mut placed_points = vec![false; r];
    let mut placed_lines = vec![false; c];
    let mut order: Vec<Slot> = Vec::with_capacity(r + c);
    for &i in fixed {
        placed_points[i] = true;
        order.push(Slot::Point(i));
    }
    while order.len() < r + c {
        let mut best: Option<(usize, Slot)> = None;
        for i in (0..r).filter(|&i| !placed_points[i]) {
            let k = (0..c).filter(|&j| placed_lines[j] && pattern.get(i, j)).count();
            if best.is_none_or(|(b, _)| k > b) {
                best = Some((k, Slot::Point(i)));
            }
        }
        for j in (0..c).filter(|&j| !placed_lines[j]) {
            let k = (0..r).filter(|&i| placed_points[i] && pattern.get(i, j)).count();
            if best.is_none_or(|(b, _)| k > b) {
                best = Some((k, Slot::Line(j)));
            }
        }
        let (_, slot) = best.expect("unplaced element remains");
        match slot {
            Slot::Point(i) => placed_points[i] = true,
            Slot::Line(j) => placed_lines[j] = true,
        }
        order.push(slot);
    }
    order
}

pub(super) fn realize(reduced: &Reduced, p: u64, options: &RealizeOptions) -> RealizabilityVerdict {
    let plane = match u32::try_from(p).ok().map(ProjectivePlane::new) {
        Some(Ok(plane)) if plane.field.degree == 1 => plane,
        _ => return RealizabilityVerdict::Unknown(format!("GF({p}) is not a supported prime field")),
    };
    let pattern = &reduced.pattern;
    if pattern.rows() > plane.size() || pattern.cols() > plane.size() {
        let trace = vec![format!(
            "{} distinct points and {} distinct lines exceed the {} of PG(2,{p})",
            pattern.rows(),
            pattern.cols(),
            plane.size()
        )];
        return RealizabilityVerdict::ProvedInfeasible(trace);
    }
    let frame = Joins::new(pattern).frame(pattern);
    let n = plane.size();
    let on_line: Vec<Vec<usize>> = (0..n).map(|l| plane.points_on(l)).collect();
    let through_point: Vec<Vec<usize>> = (0..n).map(|q| (0..n).filter(|&l| plane.incident(q, l)).collect()).collect();
    let mut search = Search {
        plane: &plane,
        pattern,
        on_line,
        through_point,
        order: placement_order(pattern, &frame),
        point_at: vec![None; pattern.rows()],
        line_at: vec![None; pattern.cols()],
        nodes: 0,
        budget: options.budget,
    };
    // the collineation group is transitive on ordered frames
    let standard: [[u32; 3]; 4] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];
    let fixed = frame.len();
    for (k, &i) in frame.iter().enumerate() {
        let index = plane.points.iter().position(|q| *q == standard[k]).expect("standard point");
        search.point_at[i] = Some(index);
    }
    let tail: Vec<Slot> = search.order[fixed..].to_vec();
    search.order = tail;
    match search.run(0) {
        Outcome::Found => {
            let to_q = |v: &[u32; 3]| -> [BigRational; 3] { std::array::from_fn(|k| int(v[k] as i64)) };
            let points = search.point_at.iter().map(|q| to_q(&plane.points[q.unwrap()])).collect();
            let lines = search.line_at.iter().map(|l| to_q(&plane.lines[l.unwrap()])).collect();
            RealizabilityVerdict::Realized(reduced.expand_exact(BaseField::Prime(p), points, lines))
        }
        Outcome::Exhausted => RealizabilityVerdict::ProvedInfeasible(vec![
            format!("frame: points {frame:?} fixed to standard coordinates"),
            format!("exhaustive search over PG(2,{p}) visited {} assignments, none consistent", search.nodes),
        ]),
        Outcome::OutOfBudget => RealizabilityVerdict::Unknown(format!("search budget of {} nodes exhausted", options.budget)),
    }
}

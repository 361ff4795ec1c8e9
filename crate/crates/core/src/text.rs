//! Plain-text file formats. Blank lines and lines starting with `#` are
//! ignored by every parser.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::hall::{Cnf, CompiledPattern, PolySystem};
use crate::lifting::{BaseField, Configuration, LiftMatrix, TruncatedSeries, Truncation};
use crate::poly::Poly;
use crate::rational::{format_rational, parse_rational};
use crate::tropical::{TropicalMatrix, TropicalValue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> TextError {
    TextError { line, message: message.into() }
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, keyword: &str) -> Result<(usize, Vec<&'a str>), TextError> {
    let (n, line) = lines.next().ok_or_else(|| err(1, format!("missing `{keyword}` header")))?;
    let words: Vec<&str> = line.split_whitespace().collect();
    if words.first() != Some(&keyword) {
        return Err(err(n, format!("expected `{keyword}` header")));
    }
    Ok((n, words[1..].to_vec()))
}

fn parse_usize(n: usize, s: &str) -> Result<usize, TextError> {
    s.parse().map_err(|_| err(n, format!("`{s}` is not a size")))
}

/// `tropmat <rows> <cols>` followed by one row per line.
pub fn parse_tropmat(text: &str) -> Result<TropicalMatrix, TextError> {
    let mut lines = content_lines(text);
    let (n, words) = header(&mut lines, "tropmat")?;
    if words.len() != 2 {
        return Err(err(n, "expected `tropmat <rows> <cols>`"));
    }
    let (rows, cols) = (parse_usize(n, words[0])?, parse_usize(n, words[1])?);
    let mut entries = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (n, line) in lines {
        if seen == rows {
            return Err(err(n, format!("more than {rows} rows")));
        }
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != cols {
            return Err(err(n, format!("expected {cols} entries, found {}", row.len())));
        }
        for s in row {
            entries.push(TropicalValue::parse(s).ok_or_else(|| err(n, format!("`{s}` is not a rational or inf")))?);
        }
        seen += 1;
    }
    if seen != rows {
        return Err(err(text.lines().count(), format!("expected {rows} rows, found {seen}")));
    }
    TropicalMatrix::new(rows, cols, entries).map_err(|e| err(n, e.to_string()))
}

pub fn write_tropmat(m: &TropicalMatrix) -> String {
    format!("tropmat {} {}\n{m}", m.rows(), m.cols())
}

/// `troplift <rows> <cols> <field> <truncation>`, then `i j : series`
/// lines. Entries not listed are zero.
pub fn parse_troplift(text: &str) -> Result<LiftMatrix, TextError> {
    let mut lines = content_lines(text);
    let (n, words) = header(&mut lines, "troplift")?;
    if words.len() != 4 {
        return Err(err(n, "expected `troplift <rows> <cols> <field> <truncation>`"));
    }
    let (rows, cols) = (parse_usize(n, words[0])?, parse_usize(n, words[1])?);
    let field = BaseField::parse(words[2]).ok_or_else(|| err(n, format!("unknown field `{}`", words[2])))?;
    let truncation = match words[3] {
        "exact" => Truncation::Exact,
        s => Truncation::Below(parse_rational(s).ok_or_else(|| err(n, format!("bad truncation `{s}`")))?),
    };
    let mut cells: BTreeMap<(usize, usize), TruncatedSeries> = BTreeMap::new();
    for (n, line) in lines {
        let (index, series) = line.split_once(':').ok_or_else(|| err(n, "expected `i j : series`"))?;
        let ij: Vec<&str> = index.split_whitespace().collect();
        if ij.len() != 2 {
            return Err(err(n, "expected `i j : series`"));
        }
        let (i, j) = (parse_usize(n, ij[0])?, parse_usize(n, ij[1])?);
        if i >= rows || j >= cols {
            return Err(err(n, format!("entry ({i}, {j}) outside {rows}x{cols}")));
        }
        let s = TruncatedSeries::parse(series, field, truncation.clone()).map_err(|e| err(n, e.to_string()))?;
        if cells.insert((i, j), s).is_some() {
            return Err(err(n, format!("entry ({i}, {j}) given twice")));
        }
    }
    let entries = (0..rows * cols)
        .map(|k| cells.remove(&(k / cols, k % cols)).unwrap_or_else(|| TruncatedSeries::zero(field, truncation.clone())))
        .collect();
    LiftMatrix::new(rows, cols, field, truncation, entries).map_err(|e| err(n, e.to_string()))
}

pub fn write_troplift(m: &LiftMatrix) -> String {
    format!("troplift {} {} {} {}\n{m}", m.rows(), m.cols(), m.field().tag(), m.truncation())
}

/// `field <tag>`, then `P i a b c` and `L j a b c` rows. Float coordinates
/// are written with 17 significant digits.
pub fn write_configuration(c: &Configuration) -> String {
    let mut out = format!("field {}\n", c.field_tag());
    match c {
        Configuration::Exact { points, lines, .. } => {
            let f = |v: &[BigRational; 3]| v.iter().map(format_rational).collect::<Vec<_>>().join(" ");
            for (i, p) in points.iter().enumerate() {
                out.push_str(&format!("P {i} {}\n", f(p)));
            }
            for (j, l) in lines.iter().enumerate() {
                out.push_str(&format!("L {j} {}\n", f(l)));
            }
        }
        Configuration::Float { points, lines } => {
            let f = |v: &[f64; 3]| v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ");
            for (i, p) in points.iter().enumerate() {
                out.push_str(&format!("P {i} {}\n", f(p)));
            }
            for (j, l) in lines.iter().enumerate() {
                out.push_str(&format!("L {j} {}\n", f(l)));
            }
        }
    }
    out
}

pub fn parse_configuration(text: &str) -> Result<Configuration, TextError> {
    let mut lines = content_lines(text);
    let (n, words) = header(&mut lines, "field")?;
    let tag = *words.first().ok_or_else(|| err(n, "missing field tag"))?;
    let field = if tag == "float" { None } else { Some(BaseField::parse(tag).ok_or_else(|| err(n, format!("unknown field `{tag}`")))?) };
    let mut exact: [Vec<[BigRational; 3]>; 2] = [Vec::new(), Vec::new()];
    let mut float: [Vec<[f64; 3]>; 2] = [Vec::new(), Vec::new()];
    for (n, line) in lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 5 {
            return Err(err(n, "expected `P|L index a b c`"));
        }
        let kind = match words[0] {
            "P" => 0,
            "L" => 1,
            other => return Err(err(n, format!("unknown record `{other}`"))),
        };
        let index = parse_usize(n, words[1])?;
        let expected = if field.is_some() { exact[kind].len() } else { float[kind].len() };
        if index != expected {
            return Err(err(n, format!("expected index {expected}, found {index}")));
        }
        if field.is_some() {
            let mut v: [BigRational; 3] = Default::default();
            for k in 0..3 {
                v[k] = parse_rational(words[2 + k]).ok_or_else(|| err(n, format!("`{}` is not rational", words[2 + k])))?;
            }
            exact[kind].push(v);
        } else {
            let mut v = [0.0; 3];
            for k in 0..3 {
                v[k] = words[2 + k].parse().map_err(|_| err(n, format!("`{}` is not a number", words[2 + k])))?;
            }
            float[kind].push(v);
        }
    }
    Ok(match field {
        Some(field) => {
            let [points, lines] = exact;
            Configuration::Exact { field, points, lines }
        }
        None => {
            let [points, lines] = float;
            Configuration::Float { points, lines }
        }
    })
}

/// DIMACS CNF: `c` comments, a `p cnf <vars> <clauses>` header, clauses
/// as literal lists terminated by `0` (possibly spanning lines).
pub fn parse_dimacs(text: &str) -> Result<Cnf, TextError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last = 0;
    for (n, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())) {
        last = n;
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let words: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || words.len() != 4 || words[1] != "cnf" {
                return Err(err(n, "expected a single `p cnf <vars> <clauses>` header"));
            }
            header = Some((parse_usize(n, words[2])?, parse_usize(n, words[3])?));
            continue;
        }
        let (vars, _) = header.ok_or_else(|| err(n, "clause before the `p cnf` header"))?;
        for w in line.split_whitespace() {
            let lit: i64 = w.parse().map_err(|_| err(n, format!("`{w}` is not a literal")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > vars {
                return Err(err(n, format!("literal {lit} exceeds {vars} variables")));
            } else {
                current.push(lit);
            }
        }
    }
    let (variables, count) = header.ok_or_else(|| err(last.max(1), "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(err(last, "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(err(last, format!("header declares {count} clauses, found {}", clauses.len())));
    }
    Ok(Cnf { variables, clauses })
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.variables, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            out.push_str(&format!("{l} "));
        }
        out.push_str("0\n");
    }
    out
}

/// One term: `[c][*]x1[^e]*x2...` or a bare coefficient.
fn parse_monomial(n: usize, piece: &str, vars: &mut usize) -> Result<Poly, TextError> {
    let (sign, body) = match piece.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, piece),
    };
    if body.is_empty() {
        return Err(err(n, "empty term"));
    }
    let mut term = Poly::int(sign);
    for factor in body.split('*') {
        if let Some(name) = factor.strip_prefix('x') {
            let (index, power) = match name.split_once('^') {
                Some((i, e)) => (i, e.parse::<u32>().map_err(|_| err(n, format!("bad exponent in `{factor}`")))?),
                None => (name, 1),
            };
            let index: usize = index.parse().map_err(|_| err(n, format!("bad variable `{factor}`")))?;
            if index == 0 {
                return Err(err(n, "variables are numbered from x1"));
            }
            *vars = (*vars).max(index);
            term = &term * &Poly::var(index - 1).pow(power);
        } else {
            let c: BigInt = factor.parse().map_err(|_| err(n, format!("`{factor}` is not an integer or variable")))?;
            term = term.scale(&BigRational::from_integer(c));
        }
    }
    Ok(term)
}

fn parse_side(n: usize, text: &str, vars: &mut usize) -> Result<Poly, TextError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err(n, "empty side"));
    }
    let mut total = Poly::zero();
    let mut current = String::new();
    let mut prev: Option<char> = None;
    for ch in compact.chars() {
        let splits = (ch == '+' || ch == '-') && prev.is_some_and(|p| !matches!(p, '^' | '*' | '+' | '-'));
        if splits {
            total = &total + &parse_monomial(n, &std::mem::take(&mut current), vars)?;
        }
        if !(ch == '+' && current.is_empty()) {
            current.push(ch);
        }
        prev = Some(ch);
    }
    Ok(&total + &parse_monomial(n, &current, vars)?)
}

/// One equation per line over `x1..xn`, implicitly `= 0`; an explicit
/// `lhs = rhs` is read as `lhs - rhs`. A leading `vars <n>` line fixes the
/// number of variables.
pub fn parse_poly_system(text: &str) -> Result<PolySystem, TextError> {
    let mut vars = 0;
    let mut declared: Option<usize> = None;
    let mut equations = Vec::new();
    for (n, line) in content_lines(text) {
        if let Some(count) = line.strip_prefix("vars ") {
            declared = Some(parse_usize(n, count.trim())?);
            continue;
        }
        let f = match line.split_once('=') {
            Some((l, r)) => &parse_side(n, l, &mut vars)? - &parse_side(n, r, &mut vars)?,
            None => parse_side(n, line, &mut vars)?,
        };
        equations.push(f);
    }
    if let Some(d) = declared {
        if d < vars {
            return Err(err(1, format!("declared {d} variables but x{vars} is used")));
        }
        vars = d;
    }
    let names = (1..=vars).map(|k| format!("x{k}")).collect();
    PolySystem::new(names, equations).map_err(|e| err(1, e.to_string()))
}

pub fn write_poly_system(sys: &PolySystem) -> String {
    let mut out = format!("vars {}\n", sys.names.len());
    for f in &sys.equations {
        let text = if f.is_zero() { "0".to_string() } else { f.fmt_with(&|v| sys.names[v].clone()) };
        out.push_str(&text);
        out.push('\n');
    }
    out
}

/// Row and column names of a compiled pattern with their origins, and the
/// incidences imposed by the equations.
pub fn write_provenance(c: &CompiledPattern) -> String {
    let mut out = format!("provenance {} {} {}\n", c.label(), c.pattern.rows(), c.pattern.cols());
    for (i, (name, origin)) in c.point_names.iter().zip(&c.point_origins).enumerate() {
        out.push_str(&format!("P {i} {name} : {origin}\n"));
    }
    for (j, (name, origin)) in c.line_names.iter().zip(&c.line_origins).enumerate() {
        out.push_str(&format!("L {j} {name} : {origin}\n"));
    }
    for (i, j) in &c.asserted {
        out.push_str(&format!("A {i} {j}\n"));
    }
    for (k, v) in c.system.names.iter().zip(&c.system.kinds) {
        if let crate::hall::VarKind::Transcendental(t) = v {
            out.push_str(&format!("T {k} {}\n", format_rational(t)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn tropmat_round_trip() {
        let text = "tropmat 2 3\n0 inf 1/2\n-3 7 2.5\n";
        let m = parse_tropmat(text).unwrap();
        assert_eq!(m.get(1, 2), &TropicalValue::Finite(crate::rational::frac(5, 2)));
        assert_eq!(parse_tropmat(&write_tropmat(&m)).unwrap(), m);
    }

    #[test]
    fn tropmat_errors() {
        assert!(parse_tropmat("tropmat 2 2\n0 0\n").is_err());
        assert!(parse_tropmat("tropmat 1 2\n0 0 0\n").is_err());
        assert!(parse_tropmat("tropmat 1 1\nx\n").is_err());
        assert!(parse_tropmat("matrix 1 1\n0\n").is_err());
    }

    #[test]
    fn troplift_round_trip() {
        let text = "troplift 2 2 q exact\n0 0 : 1\n0 1 : t\n1 0 : t\n1 1 : 1\n";
        let m = parse_troplift(text).unwrap();
        assert_eq!(parse_troplift(&write_troplift(&m)).unwrap().to_string(), m.to_string());
        let sparse = parse_troplift("troplift 1 2 gf3 5/2\n0 1 : 2*t^(1/2)\n").unwrap();
        assert_eq!(sparse.get(0, 0).to_text(), "0");
    }

    #[test]
    fn configuration_round_trip() {
        let c = Configuration::Exact {
            field: BaseField::Rational,
            points: vec![[int(1), crate::rational::frac(-2, 3), int(0)]],
            lines: vec![[int(0), int(0), int(1)]],
        };
        assert_eq!(parse_configuration(&write_configuration(&c)).unwrap(), c);
        let f = Configuration::Float { points: vec![[0.1, 1.0 / 3.0, -2.0]], lines: vec![[1e-300, 5.0, 6.0]] };
        assert_eq!(parse_configuration(&write_configuration(&f)).unwrap(), f);
    }

    #[test]
    fn dimacs() {
        let cnf = parse_dimacs("c example\np cnf 3 2\n1 -2 0\n3\n0\n").unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, -2], vec![3]]);
        assert_eq!(parse_dimacs(&write_dimacs(&cnf)).unwrap(), cnf);
        assert_eq!(parse_dimacs("p cnf 1 1\n0\n").unwrap().clauses, vec![Vec::<i64>::new()]);
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1\n").is_err());
    }

    #[test]
    fn poly_systems() {
        let sys = parse_poly_system("x1^2 - x1\n2*x1*x2 + 3 = x2\n").unwrap();
        assert_eq!(sys.names, ["x1", "x2"]);
        let x1 = Poly::var(0);
        let x2 = Poly::var(1);
        assert_eq!(sys.equations[0], &(&x1 * &x1) - &x1);
        assert_eq!(sys.equations[1], &(&(&x1 * &x2).scale(&int(2)) + &Poly::int(3)) - &x2);
        let again = parse_poly_system(&write_poly_system(&sys)).unwrap();
        assert_eq!(again, sys);
        assert!(parse_poly_system("x0 + 1").is_err());
        assert!(parse_poly_system("y1 + 1").is_err());
        assert!(parse_poly_system("x1 +").is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::GeometryError;

pub const SUPPORTED_ORDERS: [u32; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 13];

/// GF(p^d) with full addition and multiplication tables.
///
/// Elements are the integers `0..q`, read as base-`p` digit strings of the
/// polynomial coefficients (lowest degree first), reduced modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisField {
    pub characteristic: u32,
    pub degree: u32,
    /// Monic modulus, lowest coefficient first (`[c0, .., 1]`).
    pub modulus: Vec<u32>,
    order: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `(p, d)` with `q = p^d`, or `None` when `q` is not a prime power.
fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut d = 0;
    while rest % p == 0 {
        rest /= p;
        d += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, d))
}

fn digits(mut x: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x % p);
        x /= p;
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo monic `b` over GF(p); polynomials lowest-first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().expect("nonempty");
        let shift = r.len() - 1 - db;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (lead * bc) % p) % p;
        }
        r.pop();
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    // trial division by every monic polynomial of degree 1..=d/2
    for deg in 1..=d / 2 {
        for low in 0..p.pow(deg as u32) {
            let mut g = digits(low, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl GaloisField {
    /// Builds GF(q). The modulus is the monic irreducible polynomial whose
    /// lower coefficients, read as a base-`p` number, are smallest.
    pub fn new(q: u32) -> Result<Self, GeometryError> {
        if !SUPPORTED_ORDERS.contains(&q) {
            return Err(GeometryError::UnsupportedOrder(q));
        }
        let (p, d) = prime_power(q).ok_or(GeometryError::UnsupportedOrder(q))?;
        let modulus = if d == 1 {
            vec![0, 1]
        } else {
            (0..q)
                .map(|low| {
                    let mut f = digits(low, p, d as usize);
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible(f, p))
                .ok_or(GeometryError::NoIrreducible(q))?
        };
        let n = q as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..q {
            let da = digits(a, p, d as usize);
            for b in 0..q {
                let db = digits(b, p, d as usize);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = encode(&sum, p);
                let mut prod = vec![0u32; 2 * d as usize - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let reduced = if d == 1 { vec![prod[0]] } else { poly_rem(&prod, &modulus, p) };
                let mut reduced = reduced;
                reduced.resize(d as usize, 0);
                mul[(a * q + b) as usize] = encode(&reduced, p);
            }
        }
        let mut neg = vec![0; n];
        let mut inv = vec![0; n];
        for a in 0..q {
            neg[a as usize] = (0..q).find(|&b| add[(a * q + b) as usize] == 0).expect("additive inverse");
            if a != 0 {
                inv[a as usize] = (1..q)
                    .find(|&b| mul[(a * q + b) as usize] == 1)
                    .ok_or(GeometryError::NoIrreducible(q))?;
            }
        }
        Ok(GaloisField { characteristic: p, degree: d, modulus, order: q, add, mul, neg, inv })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.order + b) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.order + b) as usize]
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn dot(&self, u: &[u32; 3], v: &[u32; 3]) -> u32 {
        let mut acc = 0;
        for k in 0..3 {
            acc = self.add(acc, self.mul(u[k], v[k]));
        }
        acc
    }
}

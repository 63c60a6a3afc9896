//! Independent oracles for the rank-2 quiver side.
//!
//! Dense truncated polynomials in `x = z^{s_1}`, `y = z^{s_2}` and automorphisms
//! stored as multipliers `x -> x F`, `y -> y G`. Nothing here touches the
//! engine's series or scattering code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Polynomial with terms of total degree `<= n`; `c[a][b]` is the coefficient of `x^a y^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub c: Vec<Vec<Q>>,
}

impl Dense {
    pub fn zero(n: usize) -> Self {
        Dense { n, c: vec![vec![Q::zero(); n + 1]; n + 1] }
    }

    pub fn one(n: usize) -> Self {
        let mut d = Self::zero(n);
        d.c[0][0] = Q::one();
        d
    }

    pub fn set(&mut self, a: usize, b: usize, v: Q) {
        if a + b <= self.n {
            self.c[a][b] = v;
        }
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let n = self.n;
        let mut r = Dense::zero(n);
        for a in 0..=n {
            for b in 0..=n - a {
                if self.c[a][b].is_zero() {
                    continue;
                }
                for p in 0..=n - a - b {
                    for q in 0..=n - a - b - p {
                        if !o.c[p][q].is_zero() {
                            let t = &self.c[a][b] * &o.c[p][q];
                            r.c[a + p][b + q] += t;
                        }
                    }
                }
            }
        }
        r
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(&self) -> Dense {
        assert!(self.c[0][0].is_one());
        let mut g = self.clone();
        g.c[0][0] = Q::zero();
        let mut neg = g.clone();
        for row in neg.c.iter_mut() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        let mut r = Dense::one(self.n);
        let mut p = Dense::one(self.n);
        for _ in 0..self.n {
            p = p.mul(&neg);
            r = r.add(&p);
        }
        r
    }

    pub fn add(&self, o: &Dense) -> Dense {
        let mut r = self.clone();
        for a in 0..=self.n {
            for b in 0..=self.n - a {
                r.c[a][b] += &o.c[a][b];
            }
        }
        r
    }

    pub fn pow(&self, k: i64) -> Dense {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut r = Dense::one(self.n);
        for _ in 0..k.unsigned_abs() {
            r = r.mul(&base);
        }
        r
    }

    pub fn is_one(&self) -> bool {
        *self == Dense::one(self.n)
    }
}

/// `x -> x F`, `y -> y G`.
#[derive(Clone, Debug, PartialEq)]
pub struct Aut {
    pub f: Dense,
    pub g: Dense,
}

impl Aut {
    pub fn identity(n: usize) -> Self {
        Aut { f: Dense::one(n), g: Dense::one(n) }
    }

    /// `z^γ -> h^{L(γ)} z^γ`.
    pub fn wall(h: &Dense, l: [i64; 2]) -> Self {
        Aut { f: h.pow(l[0]), g: h.pow(l[1]) }
    }

    /// Image of a polynomial: substitute `x F`, `y G`.
    pub fn apply(&self, p: &Dense) -> Dense {
        let n = p.n;
        let mut xs = vec![Dense::one(n)];
        let mut ys = vec![Dense::one(n)];
        let mut xf = Dense::zero(n);
        let mut yg = Dense::zero(n);
        for a in 0..n {
            for b in 0..n - a {
                xf.c[a + 1][b] = self.f.c[a][b].clone();
                yg.c[a][b + 1] = self.g.c[a][b].clone();
            }
        }
        for k in 1..=n {
            xs.push(xs[k - 1].mul(&xf));
            ys.push(ys[k - 1].mul(&yg));
        }
        let mut r = Dense::zero(n);
        for a in 0..=n {
            for b in 0..=n - a {
                if !p.c[a][b].is_zero() {
                    let mut t = xs[a].mul(&ys[b]);
                    for row in t.c.iter_mut() {
                        for v in row.iter_mut() {
                            *v *= &p.c[a][b];
                        }
                    }
                    r = r.add(&t);
                }
            }
        }
        r
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Aut) -> Aut {
        Aut { f: self.f.mul(&self.apply(&first.f)), g: self.g.mul(&self.apply(&first.g)) }
    }
}

/// Crossing form for direction `d` with velocity `v`: `sign⟨d, v⟩ · ω(d, -)`.
pub fn crossing(m: i64, d: [i64; 2], v: [i64; 2]) -> [i64; 2] {
    let s = (d[0] * v[0] + d[1] * v[1]).signum();
    assert_ne!(s, 0);
    // ω(s_1, s_2) = m
    [s * (-m * d[1]), s * (m * d[0])]
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Wall functions of the consistent completion of the `m`-Kronecker cluster
/// diagram, per primitive direction, up to total degree `n`.
///
/// Factorisation: the product across the two initial walls through the
/// second quadrant equals the product through the fourth quadrant, where the
/// added rays `ℝ_{>=0}(γ_2, -γ_1)` are met in clockwise order. Unknown
/// coefficients enter the degree-`d` part linearly and are solved exactly.
pub fn kronecker_walls(m: i64, n: usize) -> BTreeMap<(i64, i64), Dense> {
    let simple = |a: usize, b: usize| {
        let mut h = Dense::one(n);
        h.set(a, b, Q::one());
        h
    };
    let wx = simple(1, 0);
    let wy = simple(0, 1);
    // ccw: ray (0,1) on s_1^⊥, then ray (-1,0) on s_2^⊥
    let t1 = Aut::wall(&wx, crossing(m, [1, 0], [-1, 0]));
    let t2 = Aut::wall(&wy, crossing(m, [0, 1], [0, -1]));
    let target = t2.after(&t1);

    let mut dirs: Vec<(i64, i64)> = Vec::new();
    for a in 1..=n as i64 {
        for b in 1..=n as i64 - a {
            if gcd(a, b) == 1 {
                dirs.push((a, b));
            }
        }
    }
    // clockwise from angle 0: ray (b, -a) has slope -a/b, decreasing
    dirs.sort_by(|p, q| (p.0 * q.1).cmp(&(q.0 * p.1)));
    let mut walls: BTreeMap<(i64, i64), Dense> = dirs.iter().map(|&d| (d, Dense::one(n))).collect();

    let product = |walls: &BTreeMap<(i64, i64), Dense>| {
        // cw: ray (1,0) on s_2^⊥ first, then the added rays, then ray (0,-1) on s_1^⊥
        let mut p = Aut::wall(&wy, crossing(m, [0, 1], [0, -1]));
        for &(a, b) in &dirs {
            let ray = [b, -a];
            let vel = [ray[1], -ray[0]];
            let l = crossing(m, [a, b], vel);
            p = Aut::wall(&walls[&(a, b)], l).after(&p);
        }
        let last = Aut::wall(&wx, crossing(m, [1, 0], [-1, 0]));
        last.after(&p)
    };

    for d in 2..=n {
        let p = product(&walls);
        for a in 1..d {
            let b = d - a;
            let dx = &target.f.c[a][b] - &p.f.c[a][b];
            let dy = &target.g.c[a][b] - &p.g.c[a][b];
            if dx.is_zero() && dy.is_zero() {
                continue;
            }
            let g = gcd(a as i64, b as i64);
            let dir = (a as i64 / g, b as i64 / g);
            let ray = [dir.1, -dir.0];
            let l = crossing(m, [dir.0, dir.1], [ray[1], -ray[0]]);
            let kappa = if l[0] != 0 { dx.clone() / qi(l[0]) } else { dy.clone() / qi(l[1]) };
            assert_eq!(&kappa * qi(l[0]), dx, "x-part inconsistent at ({a},{b})");
            assert_eq!(&kappa * qi(l[1]), dy, "y-part inconsistent at ({a},{b})");
            let w = walls.get_mut(&dir).unwrap();
            let mut inc = Dense::one(n);
            inc.set(a, b, kappa);
            *w = w.mul(&inc);
        }
    }
    let p = product(&walls);
    assert_eq!(p, target, "factorisation incomplete");
    walls.retain(|_, f| !f.is_one());
    walls
}

/// Both path products for an explicit list of added walls `(direction, function)`.
pub fn path_products(m: i64, n: usize, added: &[((i64, i64), Dense)]) -> (Aut, Aut) {
    let simple = |a: usize, b: usize| {
        let mut h = Dense::one(n);
        h.set(a, b, Q::one());
        h
    };
    let wx = simple(1, 0);
    let wy = simple(0, 1);
    let ccw = Aut::wall(&wy, crossing(m, [0, 1], [0, -1])).after(&Aut::wall(&wx, crossing(m, [1, 0], [-1, 0])));
    let mut sorted = added.to_vec();
    sorted.sort_by(|p, q| (p.0 .0 * q.0 .1).cmp(&(q.0 .0 * p.0 .1)));
    let mut p = Aut::wall(&wy, crossing(m, [0, 1], [0, -1]));
    for ((a, b), f) in &sorted {
        let ray = [*b, -*a];
        p = Aut::wall(f, crossing(m, [*a, *b], [ray[1], -ray[0]])).after(&p);
    }
    let cw = Aut::wall(&wx, crossing(m, [1, 0], [-1, 0])).after(&p);
    (ccw, cw)
}

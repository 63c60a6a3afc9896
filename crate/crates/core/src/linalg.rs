//! Small exact linear-algebra helpers over ℤ and ℚ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::series::Q;

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// gcd of all entries, 0 for the zero vector.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &a| gcd_i64(g, a))
}

/// Divide by the content; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = content(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|a| a / g).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_q(a: &[Q], b: &[i64]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * Q::from_integer(BigInt::from(*y)))
}

/// Rank of an integer matrix given by rows.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let m: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| r.iter().map(|&a| Q::from_integer(BigInt::from(a))).collect())
        .collect();
    echelon(m).len()
}

/// Row echelon form over ℚ; returns the nonzero rows.
fn echelon(mut m: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    if m.is_empty() {
        return m;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                for k in 0..cols {
                    let t = &m[r][k] * &f;
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

/// Solve `a x = b` over ℚ (rows of `a`), returning one solution if consistent.
pub fn solve(a: &[Vec<i64>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r: Vec<Q> = row.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect();
            r.push(bi.clone());
            r
        })
        .collect();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for k in 0..=n {
            m[r][k] = &m[r][k] / &pivot;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..=n {
                    let t = &m[r][k] * &f;
                    m[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n].clone();
    }
    Some(x)
}

/// Determinant of a square integer matrix (Bareiss elimination).
pub fn det(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&a| BigInt::from(a)).collect()).collect();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].clone() * sign
}

/// gcd of the maximal minors of a full-row-rank `r × n` matrix: the order of
/// its cokernel when that cokernel is finite.
pub fn maximal_minor_gcd(rows: &[Vec<i64>]) -> BigInt {
    let r = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut g = BigInt::zero();
    let mut cols: Vec<usize> = (0..r).collect();
    if r > n {
        return g;
    }
    loop {
        let sub: Vec<Vec<i64>> = rows.iter().map(|row| cols.iter().map(|&c| row[c]).collect()).collect();
        g = g.gcd(&det(&sub));
        let mut i = r;
        while i > 0 && cols[i - 1] == i - 1 + n - r {
            i -= 1;
        }
        if i == 0 {
            return g.abs();
        }
        cols[i - 1] += 1;
        for j in i..r {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

/// Unimodular completion: some `w` with `det(u, w) = 1` for primitive `u`.
pub fn complete_basis(u: [i64; 2]) -> [i64; 2] {
    let e = u[0].extended_gcd(&u[1]);
    debug_assert_eq!(e.gcd.abs(), 1);
    let s = e.gcd.signum();
    [-e.y * s, e.x * s]
}

pub fn det2(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Counterclockwise angular order on nonzero plane vectors, starting at the positive x-axis.
pub fn angle_cmp(a: [i64; 2], b: [i64; 2]) -> std::cmp::Ordering {
    fn half(v: [i64; 2]) -> u8 {
        if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
            0
        } else {
            1
        }
    }
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&det2(a, b)))
}

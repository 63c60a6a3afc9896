//! Truncated power series with exact rational coefficients.
//!
//! A series lives in a [`Shape`]: a lattice part (dimension vectors on the
//! quiver side, points of `M` on the seed side) and a block of formal
//! variables `t_i` (seed side only). The grading used for truncation is the
//! coordinate sum of the lattice part on the quiver side and the total
//! `t`-degree on the seed side.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exact rational coefficient.
pub type Q = BigRational;

/// Build a rational from an integer pair.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Build an integral rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Which coordinates count towards the truncation degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    /// Sum of the lattice coordinates (quiver side, exponents in `N_Q^+`).
    Lattice,
    /// Sum of the `t` exponents (seed side).
    Formal,
}

/// The exponent context of a series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub lattice_rank: usize,
    pub t_count: usize,
    pub grading: Grading,
}

impl Shape {
    /// Quiver-side context: exponents are dimension vectors with `n` entries.
    pub fn quiver(n: usize) -> Self {
        Shape { lattice_rank: n, t_count: 0, grading: Grading::Lattice }
    }

    /// Seed-side context: exponents are pairs `(m, A)` with `m` in a rank `r` lattice.
    pub fn seed(rank: usize, t_count: usize) -> Self {
        Shape { lattice_rank: rank, t_count, grading: Grading::Formal }
    }
}

/// Monomial exponent: lattice part plus `t` part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent {
    pub lattice: SmallVec<[i64; 4]>,
    pub t: SmallVec<[u32; 6]>,
}

impl Exponent {
    pub fn new(lattice: &[i64], t: &[u32]) -> Self {
        Exponent { lattice: SmallVec::from_slice(lattice), t: SmallVec::from_slice(t) }
    }

    /// Pure lattice exponent (quiver side).
    pub fn lattice(lattice: &[i64]) -> Self {
        Self::new(lattice, &[])
    }

    pub fn zero(shape: &Shape) -> Self {
        Exponent {
            lattice: SmallVec::from_elem(0, shape.lattice_rank),
            t: SmallVec::from_elem(0, shape.t_count),
        }
    }

    pub fn fits(&self, shape: &Shape) -> bool {
        self.lattice.len() == shape.lattice_rank && self.t.len() == shape.t_count
    }

    pub fn is_zero(&self) -> bool {
        self.lattice.iter().all(|&a| a == 0) && self.t.iter().all(|&a| a == 0)
    }

    pub fn degree(&self, grading: Grading) -> i64 {
        match grading {
            Grading::Lattice => self.lattice.iter().sum(),
            Grading::Formal => self.t.iter().map(|&a| a as i64).sum(),
        }
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent {
            lattice: self.lattice.iter().zip(&other.lattice).map(|(a, b)| a + b).collect(),
            t: self.t.iter().zip(&other.t).map(|(a, b)| a + b).collect(),
        }
    }

    /// `k` times the exponent, for `k >= 0`.
    pub fn scale(&self, k: u32) -> Exponent {
        Exponent {
            lattice: self.lattice.iter().map(|a| a * k as i64).collect(),
            t: self.t.iter().map(|a| a * k).collect(),
        }
    }

    /// gcd of all entries (lattice and `t` parts together).
    pub fn content(&self) -> u64 {
        let mut g = 0u64;
        for &a in &self.lattice {
            g = gcd_u64(g, a.unsigned_abs());
        }
        for &a in &self.t {
            g = gcd_u64(g, a as u64);
        }
        g
    }

    fn to_json(&self) -> (Value, Value) {
        (json!(self.lattice.to_vec()), json!(self.t.to_vec()))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.lattice.as_slice())?;
        if !self.t.is_empty() {
            write!(f, "t{:?}", self.t.as_slice())?;
        }
        Ok(())
    }
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// A finitely supported sum of monomials, truncated above `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    shape: Shape,
    order: u32,
    terms: HashMap<Exponent, Q>,
}

impl Series {
    pub fn zero(shape: &Shape, order: u32) -> Self {
        Series { shape: shape.clone(), order, terms: HashMap::new() }
    }

    pub fn one(shape: &Shape, order: u32) -> Self {
        Self::monomial(shape, order, Exponent::zero(shape), Q::one())
    }

    /// `c z^e`, or zero if `e` lies above the truncation order.
    pub fn monomial(shape: &Shape, order: u32, e: Exponent, c: Q) -> Self {
        let mut s = Self::zero(shape, order);
        s.add_term(e, c);
        s
    }

    /// `1 + z^e`.
    pub fn binomial(shape: &Shape, order: u32, e: Exponent) -> Self {
        let mut s = Self::one(shape, order);
        s.add_term(e, Q::one());
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Q)>>(shape: &Shape, order: u32, it: I) -> Self {
        let mut s = Self::zero(shape, order);
        for (e, c) in it {
            s.add_term(e, c);
        }
        s
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter()
    }

    /// Terms in lexicographic exponent order.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn degree_of(&self, e: &Exponent) -> i64 {
        e.degree(self.shape.grading)
    }

    /// Add `c z^e` in place, dropping terms above the order and zero sums.
    pub fn add_term(&mut self, e: Exponent, c: Q) {
        debug_assert!(e.fits(&self.shape), "exponent {e} does not fit shape");
        if c.is_zero() || e.degree(self.shape.grading) > self.order as i64 {
            return;
        }
        match self.terms.entry(e) {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn coefficient(&self, e: &Exponent) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Exponent::zero(&self.shape))
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    /// True when the only degree-zero term is the constant 1.
    pub fn is_unipotent(&self) -> bool {
        let zero = Exponent::zero(&self.shape);
        self.constant_term().is_one()
            && self.terms.keys().all(|e| *e == zero || self.degree_of(e) > 0)
    }

    /// Lowest degree of a term different from the constant 1, if any.
    pub fn lowest_nontrivial_degree(&self) -> Option<i64> {
        let zero = Exponent::zero(&self.shape);
        self.terms
            .iter()
            .filter(|(e, c)| !(**e == zero && c.is_one()))
            .map(|(e, _)| self.degree_of(e))
            .min()
    }

    /// The terms of exactly the given degree.
    pub fn homogeneous_part(&self, degree: i64) -> Series {
        let mut s = Self::zero(&self.shape, self.order);
        for (e, c) in &self.terms {
            if self.degree_of(e) == degree {
                s.terms.insert(e.clone(), c.clone());
            }
        }
        s
    }

    /// Drop all terms above `order`.
    pub fn truncate(&self, order: u32) -> Series {
        let order = order.min(self.order);
        let mut s = Self::zero(&self.shape, order);
        for (e, c) in &self.terms {
            if self.degree_of(e) <= order as i64 {
                s.terms.insert(e.clone(), c.clone());
            }
        }
        s
    }

    fn check(&self, other: &Series) -> Result<u32> {
        if self.shape != other.shape {
            return Err(Error::ContextMismatch);
        }
        Ok(self.order.min(other.order))
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        let order = self.check(other)?;
        let mut s = self.truncate(order);
        for (e, c) in &other.terms {
            s.add_term(e.clone(), c.clone());
        }
        Ok(s)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = -c.clone();
        }
        s
    }

    pub fn scale(&self, k: &Q) -> Series {
        if k.is_zero() {
            return Self::zero(&self.shape, self.order);
        }
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c *= k;
        }
        s
    }

    /// Multiply by the monomial `c z^e`.
    pub fn mul_monomial(&self, e: &Exponent, c: &Q) -> Series {
        let mut s = Self::zero(&self.shape, self.order);
        if c.is_zero() {
            return s;
        }
        for (f, d) in &self.terms {
            let g = f.add(e);
            if self.degree_of(&g) <= self.order as i64 {
                s.terms.insert(g, d * c);
            }
        }
        s
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        let order = self.check(other)?;
        let grading = self.shape.grading;
        let bound = order as i64;
        let a: Vec<(&Exponent, &Q, i64)> =
            self.terms.iter().map(|(e, c)| (e, c, e.degree(grading))).collect();
        let b: Vec<(&Exponent, &Q, i64)> =
            other.terms.iter().map(|(e, c)| (e, c, e.degree(grading))).collect();
        let mut out = Self::zero(&self.shape, order);
        for (ea, ca, da) in &a {
            for (eb, cb, db) in &b {
                if da + db > bound {
                    continue;
                }
                out.add_term(ea.add(eb), *ca * *cb);
            }
        }
        Ok(out)
    }

    /// `self - 1`, requiring a unipotent series.
    fn minus_one(&self, what: &str) -> Result<Series> {
        if !self.is_unipotent() {
            return Err(Error::NonUnit(format!("{what} needs constant term 1 and no other degree-0 terms")));
        }
        let mut g = self.clone();
        g.terms.remove(&Exponent::zero(&self.shape));
        Ok(g)
    }

    /// Powers `g^0 .. g^order` of a series without degree-0 part.
    fn powers(g: &Series) -> Result<Vec<Series>> {
        let mut pw = vec![Series::one(&g.shape, g.order)];
        for k in 1..=g.order as usize {
            let next = pw[k - 1].mul(g)?;
            if next.is_empty() {
                break;
            }
            pw.push(next);
        }
        Ok(pw)
    }

    /// `self^n` for any integer `n`; negative powers need a unipotent series.
    pub fn int_pow(&self, n: i64) -> Result<Series> {
        if n == 0 {
            return Ok(Series::one(&self.shape, self.order));
        }
        if self.is_unipotent() {
            let g = self.minus_one("int_pow")?;
            let pw = Self::powers(&g)?;
            let mut out = Series::zero(&self.shape, self.order);
            let mut binom = Q::one();
            for (k, p) in pw.iter().enumerate() {
                if k > 0 {
                    binom = binom * qi(n - (k as i64 - 1)) / qi(k as i64);
                }
                if binom.is_zero() {
                    break;
                }
                for (e, c) in &p.terms {
                    out.add_term(e.clone(), c * &binom);
                }
            }
            return Ok(out);
        }
        if n < 0 {
            return Err(Error::NonUnit("negative power of a series whose constant term is not 1".into()));
        }
        let mut base = self.clone();
        let mut acc = Series::one(&self.shape, self.order);
        let mut m = n as u64;
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Exponential of a series with no degree-0 terms.
    pub fn exp(&self) -> Result<Series> {
        if self.terms.keys().any(|e| self.degree_of(e) <= 0) {
            return Err(Error::NonUnit("exp needs a series without degree-0 terms".into()));
        }
        let pw = Self::powers(self)?;
        let mut out = Series::zero(&self.shape, self.order);
        let mut fact = Q::one();
        for (k, p) in pw.iter().enumerate() {
            if k > 0 {
                fact *= qi(k as i64);
            }
            let inv = fact.recip();
            for (e, c) in &p.terms {
                out.add_term(e.clone(), c * &inv);
            }
        }
        Ok(out)
    }

    /// Logarithm of a unipotent series.
    pub fn log(&self) -> Result<Series> {
        let g = self.minus_one("log")?;
        let pw = Self::powers(&g)?;
        let mut out = Series::zero(&self.shape, self.order);
        for (k, p) in pw.iter().enumerate().skip(1) {
            let w = if k % 2 == 1 { q(1, k as i64) } else { q(-1, k as i64) };
            for (e, c) in &p.terms {
                out.add_term(e.clone(), c * &w);
            }
        }
        Ok(out)
    }

    /// Canonical JSON: order plus terms `[lattice, t, num, den]` in lexicographic order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                let (l, t) = e.to_json();
                json!([l, t, int_json(c.numer()), int_json(c.denom())])
            })
            .collect();
        json!({ "order": self.order, "terms": terms })
    }

    pub fn from_json(shape: &Shape, v: &Value) -> Result<Series> {
        let order = v
            .get("order")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Invalid("series: missing field `order`".into()))? as u32;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("series: missing field `terms`".into()))?;
        let mut s = Series::zero(shape, order);
        for (k, t) in terms.iter().enumerate() {
            let bad = || Error::Invalid(format!("series: malformed term {k}"));
            let arr = t.as_array().filter(|a| a.len() == 4).ok_or_else(bad)?;
            let lattice: Vec<i64> = serde_json::from_value(arr[0].clone()).map_err(|_| bad())?;
            let tt: Vec<u32> = serde_json::from_value(arr[1].clone()).map_err(|_| bad())?;
            let e = Exponent::new(&lattice, &tt);
            if !e.fits(shape) {
                return Err(bad());
            }
            let num = json_int(&arr[2]).ok_or_else(bad)?;
            let den = json_int(&arr[3]).ok_or_else(bad)?;
            if den.is_zero() {
                return Err(bad());
            }
            s.add_term(e, Q::new(num, den));
        }
        Ok(s)
    }
}

fn int_json(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn json_int(v: &Value) -> Option<BigInt> {
    if let Some(i) = v.as_i64() {
        return Some(BigInt::from(i));
    }
    v.as_str().and_then(|s| s.parse().ok())
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let sign = if c.is_negative() { " - " } else if k > 0 { " + " } else { "" };
            let lead = if k == 0 && c.is_negative() { "-" } else { sign };
            write!(f, "{lead}{}*z^{e}", c.abs())?;
        }
        Ok(())
    }
}

/// Apply `z^e -> wall_fn^{exponent_of(e)} z^e` termwise to `target`.
///
/// Terms are grouped by their exponent so each needed power of `wall_fn`
/// is computed once.
pub fn apply_wall_crossing<F>(target: &Series, wall_fn: &Series, exponent_of: F) -> Result<Series>
where
    F: Fn(&Exponent) -> i64,
{
    if target.shape != wall_fn.shape {
        return Err(Error::ContextMismatch);
    }
    if !wall_fn.is_unipotent() {
        return Err(Error::NonUnit("wall function must have constant term 1".into()));
    }
    let order = target.order.min(wall_fn.order);
    let mut groups: HashMap<i64, Vec<(&Exponent, &Q)>> = HashMap::new();
    for (e, c) in &target.terms {
        groups.entry(exponent_of(e)).or_default().push((e, c));
    }
    let mut out = Series::zero(&target.shape, order);
    let mut keys: Vec<i64> = groups.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let p = wall_fn.truncate(order).int_pow(k)?;
        for (e, c) in &groups[&k] {
            for (f, d) in &p.terms {
                out.add_term(e.add(f), *c * d);
            }
        }
    }
    Ok(out)
}

//! Seed-side scattering: the initial HDTV diagram, its completion, the
//! incoming/outgoing split and the curve classes attached to walls.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::SymplecticSeed;
use crate::linalg::{self, angle_cmp, det2};
use crate::quiver_dt::qjson;
use crate::scattering::{prim2, Cone, Context, Diagram, Wall, WallTag};
use crate::series::{Exponent, Q, Series};

/// Hypothesis text for classes that are multiples of a simple root.
pub const SIMPLE_MULTIPLE_HYPOTHESIS: &str = "γ ∉ ℤ_{≥1}s_i";

pub fn seed_context(seed: &SymplecticSeed) -> Context {
    Context::Seed { rank: seed.rank, v: (0..seed.t_count()).map(|i| seed.v(i)).collect() }
}

fn check_seed(seed: &SymplecticSeed) -> Result<()> {
    let r = seed.validate();
    if !r.is_valid() {
        let msgs: Vec<String> = r.issues.iter().map(|i| format!("{}: {}", i.code, i.message)).collect();
        return Err(Error::Invalid(format!("invalid seed: {}", msgs.join("; "))));
    }
    Ok(())
}

/// `{(ℝ_{>=0} v_i, 1 + t_i z^{v_i}) : i ∈ I}`.
///
/// In general the support is `ρ + ℝ v_i` over the codimension-one cones `ρ`
/// of the quotient fan in `M_ℝ/ℝ v_i`. In rank 2 that quotient is a line whose
/// only codimension-one cone is `{0}`, lifting to the ray through `v_i`.
pub fn initial_hdtv_diagram(seed: &SymplecticSeed, order: u32) -> Result<Diagram> {
    check_seed(seed)?;
    let ctx = seed_context(seed);
    let shape = ctx.shape();
    let n = seed.t_count();
    let mut d = Diagram::new(ctx, order);
    for i in 0..n {
        let v = seed.v(i);
        let mut t = vec![0u32; n];
        t[i] = 1;
        let f = Series::binomial(&shape, order, Exponent::new(&v, &t));
        d.walls.push(Wall::new(Cone::ray([v[0], v[1]]), v, f, WallTag::Initial).with_label(i));
    }
    Ok(d)
}

/// Complete the initial HDTV diagram and check that every added monomial
/// `z^m t^A` satisfies `m = Σ a_i v_i`.
pub fn hdtv_diagram(seed: &SymplecticSeed, order: u32) -> Result<Diagram> {
    let d = initial_hdtv_diagram(seed, order)?.complete(order)?;
    let v: Vec<Vec<i64>> = (0..seed.t_count()).map(|i| seed.v(i)).collect();
    for w in d.walls.iter().filter(|w| w.tag == WallTag::Added) {
        for (e, _) in w.function.terms() {
            let mut m = vec![0i64; seed.rank];
            for (i, &a) in e.t.iter().enumerate() {
                for r in 0..seed.rank {
                    m[r] += a as i64 * v[i][r];
                }
            }
            if m.as_slice() != e.lattice.as_slice() {
                return Err(Error::Invalid(format!("added monomial z^{e} violates m = Σ a_i v_i")));
            }
        }
    }
    Ok(d)
}

/// `(f_in, f_out)`: products over the initial and over the added walls through `x`.
pub fn split_in_out(d: &Diagram, x: &[i64]) -> Result<(Series, Series)> {
    Ok((d.chamber_function_tagged(x, WallTag::Initial)?, d.chamber_function_tagged(x, WallTag::Added)?))
}

/// `β̄·D'` per fan ray and the exceptional multiplicities `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClassRecord {
    pub intersection_numbers: Vec<([i64; 2], i64)>,
    pub exceptional_multiplicities: Vec<i64>,
    /// `m_A = -Σ a_i v_i`.
    pub m_a: [i64; 2],
    /// Generators of `σ_x` with the coefficients `b_j` of `m_A`.
    pub sigma: Vec<([i64; 2], i64)>,
}

impl CurveClassRecord {
    /// `Σ (β̄·D') u_{D'}`; zero by toric rational equivalence.
    pub fn rational_equivalence_sum(&self) -> [i64; 2] {
        self.intersection_numbers.iter().fold([0, 0], |acc, (u, k)| [acc[0] + k * u[0], acc[1] + k * u[1]])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "intersection_numbers": self.intersection_numbers.iter().map(|(u, k)| json!({ "ray": u, "value": k })).collect::<Vec<_>>(),
            "exceptional_multiplicities": self.exceptional_multiplicities,
            "m_A": self.m_a,
            "sigma_x": self.sigma.iter().map(|(u, b)| json!({ "ray": u, "b": b })).collect::<Vec<_>>(),
        })
    }
}

/// Minimal cone of the fan containing `x`: one ray, or two adjacent rays.
fn minimal_cone(rays: &[[i64; 2]], x: [i64; 2]) -> Vec<[i64; 2]> {
    let px = prim2(x);
    if rays.contains(&px) {
        return vec![px];
    }
    let mut sorted = rays.to_vec();
    sorted.sort_by(|a, b| angle_cmp(*a, *b));
    let len = sorted.len();
    for k in 0..len {
        let a = sorted[k];
        let b = sorted[(k + 1) % len];
        if det2(a, x) > 0 && det2(x, b) > 0 && det2(a, b) > 0 {
            return vec![a, b];
        }
    }
    vec![]
}

pub fn curve_class(seed: &SymplecticSeed, a: &[i64], x: &[i64]) -> Result<CurveClassRecord> {
    check_seed(seed)?;
    let n = seed.t_count();
    if a.len() != n {
        return Err(Error::Dimension { expected: n, got: a.len() });
    }
    if a.iter().all(|&k| k == 0) || a.iter().any(|&k| k < 0) {
        return Err(Error::Domain("A must be a nonzero non-negative multiplicity vector".into()));
    }
    if x.len() != 2 || (x[0] == 0 && x[1] == 0) {
        return Err(Error::Domain("x must be a nonzero point of M_ℝ".into()));
    }
    let mut m = [0i64; 2];
    for i in 0..n {
        let v = seed.v(i);
        m[0] -= a[i] * v[0];
        m[1] -= a[i] * v[1];
    }
    let sigma = minimal_cone(&seed.fan_rays, [x[0], x[1]]);
    let bs: Vec<i64> = match sigma.as_slice() {
        [u] => {
            if det2(*u, m) != 0 {
                return Err(Error::Domain(format!("m_A = {m:?} is not in the span of σ_x = ℝ≥0{u:?}; x is inconsistent with A")));
            }
            let k = if u[0] != 0 { m[0] / u[0] } else { m[1] / u[1] };
            vec![k]
        }
        [u, w] => {
            let d = det2(*u, *w);
            if d.abs() != 1 {
                return Err(Error::Domain(format!("σ_x spanned by {u:?}, {w:?} is not unimodular; refine the fan")));
            }
            vec![det2(m, *w) / d, det2(*u, m) / d]
        }
        _ => return Err(Error::Domain("no cone of the fan contains x".into())),
    };
    let mut numbers = Vec::with_capacity(seed.fan_rays.len());
    for &u in &seed.fan_rays {
        let mut k = 0;
        for i in 0..n {
            let p = linalg::primitive(&seed.v(i));
            if p == u {
                k += a[i];
            }
        }
        for (g, b) in sigma.iter().zip(&bs) {
            if *g == u {
                k += b;
            }
        }
        numbers.push((u, k));
    }
    Ok(CurveClassRecord {
        intersection_numbers: numbers,
        exceptional_multiplicities: a.to_vec(),
        m_a: m,
        sigma: sigma.into_iter().zip(bs).collect(),
    })
}

/// Exponent `(Σ a_i v_i, A)` of the seed-side monomial attached to `A`.
pub fn exponent_of(seed: &SymplecticSeed, a: &[i64]) -> Exponent {
    let mut m = vec![0i64; seed.rank];
    for (i, &k) in a.iter().enumerate() {
        let v = seed.v(i);
        for r in 0..seed.rank {
            m[r] += k * v[r];
        }
    }
    let t: Vec<u32> = a.iter().map(|&k| k as u32).collect();
    Exponent::new(&m, &t)
}

/// Coefficient of `z^{Σ a_i v_i} t^A` in `log f_out` at `x`: the aggregate
/// `Σ_τ k_τ N_{τ,β}` over wall types.
pub fn gw_combination(seed: &SymplecticSeed, d: &Diagram, a: &[i64], x: &[i64]) -> Result<Q> {
    if a.len() != seed.t_count() {
        return Err(Error::Dimension { expected: seed.t_count(), got: a.len() });
    }
    if a.iter().any(|&k| k < 0) || a.iter().filter(|&&k| k != 0).count() < 2 {
        return Err(Error::Hypothesis(format!("{SIMPLE_MULTIPLE_HYPOTHESIS} is required; got A = {a:?}")));
    }
    let deg: i64 = a.iter().sum();
    if deg > d.order as i64 {
        return Err(Error::Precondition(format!("diagram order {} is below |A| = {deg}", d.order)));
    }
    let (_, f_out) = split_in_out(d, x)?;
    Ok(f_out.log()?.coefficient(&exponent_of(seed, a)))
}

/// JSON record for [`gw_combination`]; the value is an aggregate over wall types.
pub fn gw_json(a: &[i64], x: &[i64], value: &Q) -> Value {
    json!({ "A": a, "x": x, "sum_ktau_N": qjson(value) })
}

//! Donaldson–Thomas invariants from the cluster scattering diagram.

use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{for_each_effective, Covector, DimensionVector, Quiver};
use crate::linalg;
use crate::scattering::{Cone, Context, Diagram, Wall, WallTag};
use crate::series::{q, qi, Exponent, Q, Series, Shape};

/// Hypothesis text for quivers whose attractor invariants are not asserted trivial.
pub const ATTRACTOR_HYPOTHESIS: &str = "attractor invariants not asserted trivial";
/// Reason classes in `ker ω_Q` are rejected.
pub const KERNEL_REMARK: &str =
    "classes in ker ω_Q have θ-independent invariants that do not play a role in any wall-crossing";

/// Where θ sits relative to the attractor point of γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChamberNote {
    Attractor,
    AntiAttractor,
    Generic,
    KernelClass,
}

impl ChamberNote {
    pub fn as_str(self) -> &'static str {
        match self {
            ChamberNote::Attractor => "attractor",
            ChamberNote::AntiAttractor => "anti-attractor",
            ChamberNote::Generic => "generic",
            ChamberNote::KernelClass => "kernel-class",
        }
    }

    /// Classify θ against the attractor point `a = ι_γ ω_Q`.
    pub fn classify(theta: &Covector, attractor: &[i64]) -> ChamberNote {
        if attractor.iter().all(|&a| a == 0) {
            return ChamberNote::KernelClass;
        }
        let t = theta.ray_point();
        let a = linalg::primitive(attractor);
        if t == a {
            ChamberNote::Attractor
        } else if t.iter().zip(&a).all(|(x, y)| *x == -*y) {
            ChamberNote::AntiAttractor
        } else {
            ChamberNote::Generic
        }
    }
}

/// Invariants of γ and its sub-multiples at θ.
#[derive(Clone, Debug, PartialEq)]
pub struct DTRecord {
    pub gamma: DimensionVector,
    pub theta: Covector,
    pub omega_bar: Q,
    pub omega: Q,
    pub chamber_note: ChamberNote,
    /// `(k, Ω̄_{kγ_0}, Ω_{kγ_0})` for the multiples of the primitive class up to γ.
    pub multiples: Vec<(u32, Q, Q)>,
}

impl DTRecord {
    /// `Ω` is stored exactly; this is its integer value when it has one.
    pub fn omega_integer(&self) -> Option<BigInt> {
        self.omega.is_integer().then(|| self.omega.to_integer())
    }

    pub fn to_json(&self) -> Value {
        let mult: Vec<Value> = self
            .multiples
            .iter()
            .map(|(k, ob, o)| json!({ "k": k, "omega_bar": qjson(ob), "omega": qjson(o) }))
            .collect();
        json!({
            "gamma": self.gamma.0,
            "theta": self.theta.0.iter().map(qjson).collect::<Vec<_>>(),
            "omega_bar": qjson(&self.omega_bar),
            "omega": qjson(&self.omega),
            "chamber_note": self.chamber_note.as_str(),
            "multiples": mult,
        })
    }
}

/// Integers as JSON numbers, other rationals as `"p/q"` strings.
pub fn qjson(x: &Q) -> Value {
    if x.is_integer() {
        if let Ok(i) = i64::try_from(x.to_integer()) {
            return json!(i);
        }
    }
    json!(x.to_string())
}

/// `{(s_i^⊥, 1 + z^{s_i}) : i ∈ I}`.
pub fn initial_cluster_diagram(quiver: &Quiver, order: u32) -> Result<Diagram> {
    if !quiver.trivial_attractor {
        return Err(Error::Hypothesis(ATTRACTOR_HYPOTHESIS.into()));
    }
    let n = quiver.vertex_count();
    let ctx = Context::Quiver { skew: quiver.skew_matrix() };
    let shape = ctx.shape();
    let mut d = Diagram::new(ctx, order);
    for i in quiver.index_set() {
        let s = DimensionVector::simple(n, i).0;
        let f = Series::binomial(&shape, order, Exponent::lattice(&s));
        d.walls.push(Wall::new(Cone::hyperplane(&s), s, f, WallTag::Initial).with_label(i));
    }
    Ok(d)
}

fn check_primitive(gamma0: &[i64]) -> Result<()> {
    if linalg::content(gamma0) != 1 {
        return Err(Error::Precondition(format!("class {gamma0:?} is not primitive")));
    }
    Ok(())
}

fn mobius_weight(j: u32) -> Q {
    let s = if j % 2 == 1 { 1 } else { -1 };
    q(s, (j * j) as i64)
}

/// `Ω̄_{kγ_0} = Σ_{j | k} (-1)^{j-1}/j² Ω_{(k/j)γ_0}`; entry `k-1` holds the value at `kγ_0`.
pub fn rational_from_integer(gamma0: &[i64], omega: &[Q]) -> Result<Vec<Q>> {
    check_primitive(gamma0)?;
    let n = omega.len() as u32;
    Ok((1..=n)
        .map(|k| {
            (1..=k).filter(|j| k % j == 0).fold(Q::zero(), |acc, j| acc + mobius_weight(j) * &omega[(k / j - 1) as usize])
        })
        .collect())
}

/// Inverse of [`rational_from_integer`] by exact triangular solve.
pub fn integer_from_rational(gamma0: &[i64], omega_bar: &[Q]) -> Result<Vec<Q>> {
    check_primitive(gamma0)?;
    let mut omega: Vec<Q> = Vec::with_capacity(omega_bar.len());
    for k in 1..=omega_bar.len() as u32 {
        let mut v = omega_bar[(k - 1) as usize].clone();
        for j in 2..=k {
            if k % j == 0 {
                v -= mobius_weight(j) * &omega[(k / j - 1) as usize];
            }
        }
        omega.push(v);
    }
    Ok(omega)
}

/// `exp(Σ_k k Ω̄_{kγ_0} z^{kγ_0})`.
pub fn assemble_wall_function(shape: &Shape, order: u32, gamma0: &Exponent, omega_bar: &[Q]) -> Result<Series> {
    let mut log = Series::zero(shape, order);
    for (k, ob) in omega_bar.iter().enumerate() {
        let k = k as u32 + 1;
        log.add_term(gamma0.scale(k), ob * qi(k as i64));
    }
    log.exp()
}

/// Exponent `e` as `k γ_0` with `k >= 0`, if it is one.
pub fn multiple_of(e: &Exponent, gamma0: &Exponent) -> Option<u32> {
    let pairs = e.lattice.iter().zip(&gamma0.lattice).map(|(a, b)| (*a, *b)).chain(e.t.iter().zip(&gamma0.t).map(|(a, b)| (*a as i64, *b as i64)));
    let mut k: Option<i64> = None;
    for (a, b) in pairs {
        if b == 0 {
            if a != 0 {
                return None;
            }
            continue;
        }
        if a % b != 0 {
            return None;
        }
        match k {
            None => k = Some(a / b),
            Some(k0) if k0 != a / b => return None,
            _ => {}
        }
    }
    match k {
        Some(k) if k >= 0 => Some(k as u32),
        None => Some(0),
        _ => None,
    }
}

/// `Ω̄_{kγ_0} = [z^{kγ_0}] log f / k` for `k = 1..=count`.
pub fn extract_dt(f: &Series, gamma0: &Exponent, count: u32) -> Result<Vec<Q>> {
    if !f.constant_term().is_one() {
        return Err(Error::NonUnit("wall function must have constant term 1".into()));
    }
    for (e, _) in f.terms() {
        if multiple_of(e, gamma0).is_none() {
            return Err(Error::Domain(format!("term z^{e} is not a power of z^{gamma0}")));
        }
    }
    let log = f.log()?;
    Ok((1..=count).map(|k| log.coefficient(&gamma0.scale(k)) / qi(k as i64)).collect())
}

/// Completed cluster diagram cache for one quiver.
///
/// Readers get an `Arc` snapshot; a query above the cached order recomputes
/// once and replaces the snapshot.
#[derive(Debug)]
pub struct DtEngine {
    quiver: Quiver,
    cache: RwLock<Option<Arc<Diagram>>>,
}

impl DtEngine {
    pub fn new(quiver: Quiver) -> Result<Self> {
        if !quiver.trivial_attractor {
            return Err(Error::Hypothesis(ATTRACTOR_HYPOTHESIS.into()));
        }
        Ok(DtEngine { quiver, cache: RwLock::new(None) })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    /// Central-wall-free completion valid at least up to `order`.
    pub fn completed(&self, order: u32) -> Result<Arc<Diagram>> {
        if let Some(d) = self.cache.read().expect("cache lock").as_ref() {
            if d.order >= order {
                return Ok(d.clone());
            }
        }
        let mut slot = self.cache.write().expect("cache lock");
        if let Some(d) = slot.as_ref() {
            if d.order >= order {
                return Ok(d.clone());
            }
        }
        let d = Arc::new(initial_cluster_diagram(&self.quiver, order)?.complete(order)?.remove_central_walls()?);
        *slot = Some(d.clone());
        Ok(d)
    }

    pub fn dt_invariants(&self, gamma: &DimensionVector, theta: &Covector, order: u32) -> Result<DTRecord> {
        let q = &self.quiver;
        if gamma.len() != q.vertex_count() || theta.len() != q.vertex_count() {
            return Err(Error::Dimension { expected: q.vertex_count(), got: gamma.len().max(theta.len()) });
        }
        if !gamma.is_effective() || gamma.is_zero() {
            return Err(Error::Domain(format!("γ = {gamma} is not a nonzero dimension vector")));
        }
        if q.in_kernel(gamma) {
            return Err(Error::Hypothesis(KERNEL_REMARK.into()));
        }
        if q.vertex_count() != 2 {
            return Err(Error::Unsupported(
                "quiver-side completion needs ambient rank 2; use the pullback route for larger quivers".into(),
            ));
        }
        let deg = gamma.total_degree() as u32;
        if order < deg {
            return Err(Error::Precondition(format!("order {order} is below the total degree {deg} of γ")));
        }
        if !q.is_gamma_general(theta, gamma, order)? {
            return Err(Error::Precondition(format!("θ = {theta} is not γ-general")));
        }
        let d = self.completed(order)?;
        let x = theta.ray_point();
        let f = d.chamber_function(&x)?;
        let k_max = gamma.divisibility() as u32;
        let gamma0 = Exponent::lattice(&gamma.primitive().0);
        let log = f.log()?;
        let bars: Vec<Q> = (1..=k_max).map(|k| log.coefficient(&gamma0.scale(k)) / qi(k as i64)).collect();
        let ints = integer_from_rational(&gamma0.lattice, &bars)?;
        let multiples: Vec<(u32, Q, Q)> =
            (1..=k_max).map(|k| (k, bars[(k - 1) as usize].clone(), ints[(k - 1) as usize].clone())).collect();
        let attractor = q.contract(&gamma.0);
        Ok(DTRecord {
            gamma: gamma.clone(),
            theta: theta.clone(),
            omega_bar: bars[(k_max - 1) as usize].clone(),
            omega: ints[(k_max - 1) as usize].clone(),
            chamber_note: ChamberNote::classify(theta, &attractor),
            multiples,
        })
    }
}

/// One-shot query; see [`DtEngine::dt_invariants`].
pub fn dt_invariants(quiver: &Quiver, gamma: &DimensionVector, theta: &Covector, order: u32) -> Result<DTRecord> {
    DtEngine::new(quiver.clone())?.dt_invariants(gamma, theta, order)
}

/// Outcome of [`positivity_audit`].
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub checked: usize,
    pub violations: Vec<DTRecord>,
}

impl PositivityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `Ω ∈ ℤ_{>=0}` for every non-kernel γ up to `degree_bound`, at both
/// rays of `γ^⊥` rescaled by `samples` seeded random positive factors.
pub fn positivity_audit(engine: &DtEngine, degree_bound: u32, samples: usize, seed: u64) -> Result<PositivityReport> {
    let q = engine.quiver();
    engine.completed(degree_bound)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gammas = Vec::new();
    for_each_effective(q.vertex_count(), degree_bound, &mut |g| {
        if !q.in_kernel(g) {
            gammas.push(g.clone());
        }
    });
    let mut report = PositivityReport { checked: 0, violations: vec![] };
    for g in gammas {
        let a = q.contract(&g.0);
        for sign in [1i64, -1] {
            for _ in 0..samples.max(1) {
                let s: i64 = rng.gen_range(1..=9);
                let theta = Covector(a.iter().map(|&v| Q::from_integer((sign * s * v).into())).collect());
                let rec = engine.dt_invariants(&g, &theta, degree_bound)?;
                report.checked += 1;
                if !rec.omega.is_integer() || rec.omega.is_negative() {
                    report.violations.push(rec);
                }
            }
        }
    }
    Ok(report)
}

//! Pulling quiver diagrams back along `ψ`, the comparison and main-identity
//! harnesses, and the worked presets.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hdtv::{self, exponent_of, hdtv_diagram, seed_context};
use crate::lattice::{validate_compatibility, CompatibilityMap, Covector, DimensionVector, Quiver, SymplecticSeed};
use crate::linalg;
use crate::quiver_dt::{initial_cluster_diagram, integer_from_rational, qjson, ChamberNote, DTRecord, DtEngine, KERNEL_REMARK};
use crate::scattering::{equivalent, is_central, Cone, Diagram, EquivalenceReport, Wall};
use crate::series::{qi, Exponent, Q, Series};

/// Slope condition for sheaves on local P².
pub const SLOPE_HYPOTHESIS: &str = "with μ:=d/r satisfying −1<μ≤0";

/// A quiver, a seed and a compatibility map between them.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: String,
    pub quiver: Quiver,
    pub seed: SymplecticSeed,
    pub psi: CompatibilityMap,
}

impl Preset {
    pub fn new(name: &str, quiver: Quiver, seed: SymplecticSeed) -> Result<Self> {
        let psi = CompatibilityMap::from_seed(&quiver, &seed);
        let p = Preset { name: name.to_string(), quiver, seed, psi };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        let mut issues: Vec<String> = Vec::new();
        for i in self.seed.validate().issues.iter().chain(&validate_compatibility(&self.quiver, &self.seed, &self.psi).issues) {
            issues.push(format!("{}: {}", i.code, i.message));
        }
        if !issues.is_empty() {
            return Err(Error::Invalid(format!("preset {}: {}", self.name, issues.join("; "))));
        }
        Ok(())
    }

    /// Is the quiver rank 2, so that both sides are computable by the planar engine.
    pub fn planar_quiver(&self) -> bool {
        self.quiver.vertex_count() == 2
    }

    /// `c(γ)`: divisibility of `ψ(γ_0)` in `N` for the primitive class `γ_0` of `γ`.
    pub fn pullback_factor(&self, gamma: &[i64]) -> i64 {
        linalg::content(&self.psi.apply(&linalg::primitive(gamma)))
    }

    /// `ι_{ψ(γ)} ω`.
    pub fn image_point(&self, gamma: &[i64]) -> Vec<i64> {
        self.seed.contract(&self.psi.apply(gamma))
    }

    /// Multiplicities over `I` of a class supported on `I`.
    pub fn restrict_to_index(&self, gamma: &[i64]) -> Result<Vec<i64>> {
        let index = self.quiver.index_set();
        for (j, &g) in gamma.iter().enumerate() {
            if g != 0 && !index.contains(&j) {
                return Err(Error::Domain(format!("class {gamma:?} has support outside I; such walls are central")));
            }
        }
        Ok(index.iter().map(|&i| gamma[i]).collect())
    }
}

/// `kronecker(m)`: `m` arrows, seed `e_1=(1,0), e_2=(0,1)` for `m = 1`,
/// `e_1=(1,1), e_2=(1-m,1)` otherwise, `ω = det`.
pub fn kronecker(m: u32) -> Result<Preset> {
    if m == 0 {
        return Err(Error::Domain("kronecker(m) needs m >= 1".into()));
    }
    let e = if m == 1 { vec![vec![1, 0], vec![0, 1]] } else { vec![vec![1, 1], vec![1 - m as i64, 1]] };
    let q = Quiver::kronecker(m).with_citation("acyclic quiver with zero potential");
    Preset::new(&format!("kronecker{m}"), q, SymplecticSeed::planar(e))
}

pub fn local_p2() -> Result<Preset> {
    let q = Quiver::from_arrows(3, &[(0, 1, 3), (1, 2, 3), (2, 0, 3)], true)?
        .with_citation("Beaujard–Manschot–Pioline: attractor invariants of the local P² quiver are trivial");
    Preset::new("local_p2", q, SymplecticSeed::planar(vec![vec![1, 1], vec![-2, 1], vec![1, -2]]))
}

pub fn cubic() -> Result<Preset> {
    let mut arrows = Vec::new();
    for (a, b) in [([0, 1], [2, 3]), ([2, 3], [4, 5]), ([4, 5], [0, 1])] {
        for i in a {
            for j in b {
                arrows.push((i, j, 1));
            }
        }
    }
    let q = Quiver::from_arrows(6, &arrows, true)?
        .with_citation("ideal triangulation of the four-punctured sphere with its Labardini-Fragoso potential");
    let e = vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![-1, -1], vec![-1, -1]];
    Preset::new("cubic", q, SymplecticSeed::planar(e))
}

pub const PRESET_NAMES: [&str; 5] = ["kronecker1", "kronecker2", "kronecker3", "local_p2", "cubic"];

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "local_p2" => local_p2(),
        "cubic" => cubic(),
        _ => match name.strip_prefix("kronecker").and_then(|m| m.parse().ok()) {
            Some(m) => kronecker(m),
            None => Err(Error::Invalid(format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", ")))),
        },
    }
}

/// Variant of the pulled-back wall function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PullbackRule {
    /// `φ(f)^{c}` with `c` the divisibility of `ψ(γ_𝔡)`: keeps crossing
    /// automorphisms compatible with `φ` for every wall.
    Matched,
    /// `φ(f)` term by term. Consistency is lost on walls with `c > 1`.
    Literal,
}

/// Map each non-central quiver wall to the seed side (matched rule).
pub fn pullback(qd: &Diagram, preset: &Preset) -> Result<Diagram> {
    pullback_with(qd, preset, PullbackRule::Matched)
}

pub fn pullback_with(qd: &Diagram, preset: &Preset, rule: PullbackRule) -> Result<Diagram> {
    let ctx = seed_context(&preset.seed);
    let shape = ctx.shape();
    let mut out = Diagram::new(ctx, qd.order);
    for (k, w) in qd.walls.iter().enumerate() {
        if is_central(&qd.context, w)? {
            return Err(Error::Precondition(format!("wall {k} is central; remove central walls first")));
        }
        let gamma0 = Exponent::lattice(&w.direction);
        let a0 = preset.restrict_to_index(&w.direction)?;
        let support = Cone {
            normal: preset.psi.apply(&w.support.normal),
            halfspaces: w.support.halfspaces.iter().map(|h| preset.psi.apply(h)).collect(),
        };
        if support.rays2().is_empty() {
            continue;
        }
        let m0 = preset.image_point(&w.direction);
        let mut f = Series::zero(&shape, qd.order);
        for (e, c) in w.function.terms() {
            let kk = crate::quiver_dt::multiple_of(e, &gamma0)
                .ok_or_else(|| Error::Domain(format!("wall {k}: term z^{e} is not a power of z^{gamma0}")))?;
            let m: Vec<i64> = m0.iter().map(|a| a * kk as i64).collect();
            let t: Vec<u32> = a0.iter().map(|&a| (a * kk as i64) as u32).collect();
            f.add_term(Exponent::new(&m, &t), c.clone());
        }
        if rule == PullbackRule::Matched {
            f = f.int_pow(preset.pullback_factor(&w.direction))?;
        }
        let mut wall = Wall::new(support, linalg::primitive(&m0), f, w.tag);
        if let Some(l) = w.label {
            wall.label = preset.quiver.index_set().iter().position(|&i| i == l);
        }
        out.walls.push(wall);
    }
    Ok(out)
}

/// Result of [`verify_comparison`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub preset: String,
    pub order: u32,
    pub equivalence: EquivalenceReport,
    /// The same check with the term-by-term pullback, for diagnostics.
    pub literal_equivalent: bool,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.equivalence.equivalent
    }

    pub fn to_json(&self) -> Value {
        let mismatch = self.equivalence.mismatch.as_ref().map(|(x, f1, f2)| {
            json!({ "point": x, "pulled_back": f1.to_json(), "hdtv": f2.to_json() })
        });
        json!({
            "check": "comparison",
            "preset": self.preset,
            "order": self.order,
            "pass": self.passed(),
            "samples": self.equivalence.samples,
            "mismatch": mismatch,
            "literal_pullback_equivalent": self.literal_equivalent,
        })
    }
}

/// Pull back the completed, central-free cluster diagram and compare it with
/// the completed HDTV diagram at one sample per cell.
pub fn verify_comparison(preset: &Preset, order: u32) -> Result<ComparisonReport> {
    if !preset.planar_quiver() {
        return Err(Error::Unsupported("the comparison check needs a rank-2 quiver".into()));
    }
    let qd = initial_cluster_diagram(&preset.quiver, order)?.complete(order)?.remove_central_walls()?;
    let seed_side = hdtv_diagram(&preset.seed, order)?;
    let equivalence = equivalent(&pullback(&qd, preset)?, &seed_side)?;
    let literal_equivalent = equivalent(&pullback_with(&qd, preset, PullbackRule::Literal)?, &seed_side)?.equivalent;
    Ok(ComparisonReport { preset: preset.name.clone(), order, equivalence, literal_equivalent })
}

/// Seed-side evaluation of quiver invariants.
///
/// The completed HDTV diagram is equivalent to the matched pullback, so at
/// `x` the coefficient of `z^{ι_{ψ(γ)}ω} t^γ` in `log f_x` is
/// `c(γ) |γ| Ω̄_γ^{+,ψ^∨(x)}`.
#[derive(Debug, Clone)]
pub struct SeedRoute {
    pub preset: Preset,
    pub diagram: Diagram,
}

impl SeedRoute {
    pub fn new(preset: &Preset, order: u32) -> Result<Self> {
        Ok(SeedRoute { preset: preset.clone(), diagram: hdtv_diagram(&preset.seed, order)? })
    }

    /// `|γ| Ω̄_γ` at `θ = ψ^∨(x)`.
    pub fn weighted_omega_bar(&self, gamma: &[i64], x: &[i64]) -> Result<Q> {
        let a = self.preset.restrict_to_index(gamma)?;
        if a.iter().sum::<i64>() > self.diagram.order as i64 {
            return Err(Error::Precondition(format!("order {} is below |γ| = {}", self.diagram.order, a.iter().sum::<i64>())));
        }
        let f = self.diagram.chamber_function(x)?;
        let coeff = f.log()?.coefficient(&exponent_of(&self.preset.seed, &a));
        Ok(coeff / qi(self.preset.pullback_factor(gamma)))
    }

    /// `Ω̄_γ` and `Ω_γ` at `θ = ψ^∨(x)` through the seed side.
    pub fn record(&self, gamma: &[i64], x: &[i64]) -> Result<DTRecord> {
        let q = &self.preset.quiver;
        let g = DimensionVector::new(gamma);
        if q.in_kernel(&g) {
            return Err(Error::Hypothesis(KERNEL_REMARK.into()));
        }
        let k_max = g.divisibility();
        let g0 = linalg::primitive(gamma);
        let mut bars = Vec::new();
        for k in 1..=k_max {
            let gk: Vec<i64> = g0.iter().map(|a| a * k).collect();
            bars.push(self.weighted_omega_bar(&gk, x)? / qi(k));
        }
        let ints = integer_from_rational(&g0, &bars)?;
        let theta = self.preset.psi.dual(&Covector::from_ints(x));
        let multiples = (1..=k_max as u32).map(|k| (k, bars[k as usize - 1].clone(), ints[k as usize - 1].clone())).collect();
        Ok(DTRecord {
            gamma: g,
            chamber_note: ChamberNote::classify(&theta, &q.contract(gamma)),
            theta,
            omega_bar: bars[k_max as usize - 1].clone(),
            omega: ints[k_max as usize - 1].clone(),
            multiples,
        })
    }
}

/// One comparison of the main identity.
#[derive(Clone, Debug, PartialEq)]
pub struct MainEntry {
    pub gamma: Vec<i64>,
    pub x: Vec<i64>,
    pub chamber: ChamberNote,
    /// `|γ| Ω̄_γ` from the quiver side (rank 2) or the seed route (rank >= 3).
    pub quiver_value: Q,
    /// Coefficient of `log f_out` (`sum_ktau_N`).
    pub gw_value: Q,
    /// Divisibility of `ψ(γ_0)`.
    pub c: i64,
    pub error: Option<String>,
}

impl MainEntry {
    pub fn holds(&self) -> bool {
        self.error.is_none() && self.quiver_value == self.gw_value
    }

    /// `c · |γ|Ω̄ = sum_ktau_N`, the identity satisfied by the matched pullback.
    pub fn holds_with_factor(&self) -> bool {
        self.error.is_none() && self.quiver_value.clone() * qi(self.c) == self.gw_value
    }

    pub fn to_json(&self) -> Value {
        json!({
            "gamma": self.gamma,
            "x": self.x,
            "chamber": self.chamber.as_str(),
            "weighted_omega_bar": qjson(&self.quiver_value),
            "sum_ktau_N": qjson(&self.gw_value),
            "c": self.c,
            "pass": self.holds(),
            "pass_with_factor": self.holds_with_factor(),
            "error": self.error,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainReport {
    pub preset: String,
    pub order: u32,
    pub entries: Vec<MainEntry>,
}

impl MainReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(MainEntry::holds)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "main",
            "preset": self.preset,
            "order": self.order,
            "pass": self.passed(),
            "entries": self.entries.iter().map(MainEntry::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Every `γ ∈ N_Q^+` of total degree `<= bound`, outside `ker ω_Q` and not a
/// multiple of a simple root.
pub fn main_gammas(quiver: &Quiver, bound: u32) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    crate::lattice::for_each_effective(quiver.vertex_count(), bound, &mut |g| {
        if !quiver.in_kernel(g) && g.simple_multiple().is_none() {
            out.push(g.0.clone());
        }
    });
    out
}

/// Compare `|γ|Ω̄_γ` with `sum_ktau_N` at `x = ±ι_{ψ(γ)}ω` for every γ.
pub fn verify_main(preset: &Preset, gammas: &[Vec<i64>], order: u32) -> Result<MainReport> {
    let route = SeedRoute::new(preset, order)?;
    let engine = if preset.planar_quiver() { Some(DtEngine::new(preset.quiver.clone())?) } else { None };
    let mut entries = Vec::new();
    for g in gammas {
        let dv = DimensionVector::new(g);
        let point = preset.image_point(g);
        for sign in [1i64, -1] {
            let x: Vec<i64> = linalg::primitive(&point).iter().map(|a| sign * a).collect();
            let chamber = if sign > 0 { ChamberNote::Attractor } else { ChamberNote::AntiAttractor };
            let mut entry = MainEntry {
                gamma: g.clone(),
                x: x.clone(),
                chamber,
                quiver_value: Q::zero(),
                gw_value: Q::zero(),
                c: preset.pullback_factor(g),
                error: None,
            };
            let res: Result<(Q, Q)> = (|| {
                if dv.simple_multiple().is_some() {
                    return Err(Error::Hypothesis(hdtv::SIMPLE_MULTIPLE_HYPOTHESIS.into()));
                }
                if preset.quiver.in_kernel(&dv) {
                    return Err(Error::Hypothesis(KERNEL_REMARK.into()));
                }
                let a = preset.restrict_to_index(g)?;
                let gw = hdtv::gw_combination(&preset.seed, &route.diagram, &a, &x)?;
                let qv = match &engine {
                    Some(e) => {
                        let theta = preset.psi.dual(&Covector::from_ints(&x));
                        let rec = e.dt_invariants(&dv, &theta, order)?;
                        rec.omega_bar * qi(dv.divisibility())
                    }
                    None => route.weighted_omega_bar(g, &x)?,
                };
                Ok((qv, gw))
            })();
            match res {
                Ok((qv, gw)) => {
                    entry.quiver_value = qv;
                    entry.gw_value = gw;
                }
                Err(e) => entry.error = Some(e.to_string()),
            }
            entries.push(entry);
        }
    }
    Ok(MainReport { preset: preset.name.clone(), order, entries })
}

/// `γ(v) = (-χ, r+d-χ, r+2d-χ)` and whether it lies in `N_Q^+`.
pub fn gamma_of_chern(r: i64, d: i64, chi: i64) -> ([i64; 3], bool) {
    let g = [-chi, r + d - chi, r + 2 * d - chi];
    (g, g.iter().all(|&a| a >= 0))
}

/// `Ω̄_v^+` for a sheaf class on local P², through the seed route at the
/// anti-attractor point of `γ(v)`.
pub fn local_p2_sheaf_dt(route: &SeedRoute, r: i64, d: i64, chi: i64) -> Result<DTRecord> {
    if r <= 0 {
        return Err(Error::Hypothesis(format!("r > 0 is required ({SLOPE_HYPOTHESIS})")));
    }
    if !(-r < d && d <= 0) {
        return Err(Error::Hypothesis(format!("slope {d}/{r} fails the hypothesis {SLOPE_HYPOTHESIS}")));
    }
    let (g, effective) = gamma_of_chern(r, d, chi);
    if !effective {
        return Err(Error::Domain(format!("γ(v) = {g:?} has a negative entry and is not a dimension vector")));
    }
    if g.iter().all(|&a| a == 0) {
        return Err(Error::Domain("γ(v) = 0".into()));
    }
    let x: Vec<i64> = linalg::primitive(&route.preset.image_point(&g)).iter().map(|a| -a).collect();
    route.record(&g, &x)
}

/// Decide whether `θ ∈ M_{Q,ℝ}` lies in `ψ^∨(M_ℝ)` and return the matching `x`.
pub fn theta_to_x(preset: &Preset, theta: &Covector) -> Result<Covector> {
    preset
        .psi
        .dual_preimage(theta)
        .ok_or_else(|| Error::Domain(format!("θ = {theta} is not in the image of ψ^∨")))
}

/// `true` when every value is in `{1, 2}` or zero.
pub fn in_one_or_two(v: &Q) -> bool {
    v.is_zero() || *v == Q::one() || *v == qi(2)
}

/// Whether `v` is a non-negative integer.
pub fn is_nonneg_integer(v: &Q) -> bool {
    v.is_integer() && !v.is_negative()
}

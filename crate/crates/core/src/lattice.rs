//! Quivers, symplectic seeds, compatibility maps and their validity checks.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, angle_cmp, det2};
use crate::series::Q;

/// A dimension vector in `N_Q` (or a vector of `N` on the seed side).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DimensionVector(pub Vec<i64>);

impl DimensionVector {
    pub fn new(v: &[i64]) -> Self {
        DimensionVector(v.to_vec())
    }

    /// Simple root `s_i` in a lattice of rank `n`.
    pub fn simple(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DimensionVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Membership in `N_Q^+`: all entries non-negative and not all zero.
    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&a| a >= 0) && !self.is_zero()
    }

    /// Divisibility `|γ|`, the gcd of the entries.
    pub fn divisibility(&self) -> i64 {
        linalg::content(&self.0)
    }

    pub fn primitive(&self) -> DimensionVector {
        DimensionVector(linalg::primitive(&self.0))
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    /// True when `self` is a positive multiple of the simple root `s_i` for some `i`.
    pub fn simple_multiple(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.0.len()).filter(|&i| self.0[i] != 0).collect();
        match nz.as_slice() {
            [i] if self.0[*i] > 0 => Some(*i),
            _ => None,
        }
    }

    pub fn collinear(&self, other: &DimensionVector) -> bool {
        let n = self.0.len();
        (0..n).all(|i| (0..n).all(|j| self.0[i] * other.0[j] == self.0[j] * other.0[i]))
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A rational point of the dual space (`M_{Q,ℝ}` or `M_ℝ`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Covector(pub Vec<Q>);

impl Covector {
    pub fn from_ints(v: &[i64]) -> Self {
        Covector(v.iter().map(|&a| Q::from_integer(BigInt::from(a))).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn pair(&self, gamma: &DimensionVector) -> Result<Q> {
        if gamma.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), got: gamma.len() });
        }
        Ok(linalg::dot_q(&self.0, &gamma.0))
    }

    /// The integer point on the same open ray with coprime entries.
    pub fn ray_point(&self) -> Vec<i64> {
        let l = self.0.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, a| num_integer::gcd(acc, a.clone()));
        ints.iter()
            .map(|a| if g.is_zero() { 0 } else { (a / &g).to_i64().expect("coordinate overflow") })
            .collect()
    }
}

impl fmt::Display for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A quiver given by its arrow-count matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertex_count: usize,
    arrows: Vec<Vec<u32>>,
    /// Asserted triviality of the attractor invariants; never computed here.
    pub trivial_attractor: bool,
    /// Where the triviality assertion comes from.
    pub citation: Option<String>,
}

impl Quiver {
    /// Build from `(from, to, count)` triples with 0-based vertices.
    pub fn from_arrows(vertex_count: usize, arrows: &[(usize, usize, u32)], trivial_attractor: bool) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Invalid("a quiver needs at least one vertex".into()));
        }
        let mut a = vec![vec![0u32; vertex_count]; vertex_count];
        for &(i, j, c) in arrows {
            if i >= vertex_count || j >= vertex_count {
                return Err(Error::Invalid(format!("arrow {i}->{j} references a missing vertex")));
            }
            a[i][j] += c;
        }
        Ok(Quiver { vertex_count, arrows: a, trivial_attractor, citation: None })
    }

    pub fn from_matrix(arrows: Vec<Vec<u32>>, trivial_attractor: bool) -> Result<Self> {
        let n = arrows.len();
        if n == 0 || arrows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("arrow matrix must be square and non-empty".into()));
        }
        Ok(Quiver { vertex_count: n, arrows, trivial_attractor, citation: None })
    }

    /// The `m`-Kronecker quiver: two vertices, `m` arrows from the first to the second.
    pub fn kronecker(m: u32) -> Self {
        Quiver::from_arrows(2, &[(0, 1, m)], true).expect("valid")
    }

    pub fn with_citation(mut self, c: &str) -> Self {
        self.citation = Some(c.to_string());
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arrow_count(&self, i: usize, j: usize) -> u32 {
        self.arrows[i][j]
    }

    pub fn arrow_matrix(&self) -> &[Vec<u32>] {
        &self.arrows
    }

    /// Matrix `B` with `B_ij = ω_Q(s_i, s_j) = a_ij - a_ji`.
    pub fn skew_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count;
        (0..n)
            .map(|i| (0..n).map(|j| self.arrows[i][j] as i64 - self.arrows[j][i] as i64).collect())
            .collect()
    }

    fn check_len(&self, g: &DimensionVector) -> Result<()> {
        if g.len() != self.vertex_count {
            return Err(Error::Dimension { expected: self.vertex_count, got: g.len() });
        }
        Ok(())
    }

    /// `ω_Q(γ, γ') = Σ (a_ij - a_ji) γ_i γ'_j`.
    pub fn skew_form(&self, g: &DimensionVector, h: &DimensionVector) -> Result<i64> {
        self.check_len(g)?;
        self.check_len(h)?;
        let b = self.skew_matrix();
        let mut s = 0;
        for i in 0..self.vertex_count {
            for j in 0..self.vertex_count {
                s += b[i][j] * g.0[i] * h.0[j];
            }
        }
        Ok(s)
    }

    /// Integer coordinates of `ι_γ ω_Q = ω_Q(γ, -)`, without the zero check.
    pub fn contract(&self, g: &[i64]) -> Vec<i64> {
        let b = self.skew_matrix();
        (0..self.vertex_count).map(|j| (0..self.vertex_count).map(|i| g[i] * b[i][j]).sum()).collect()
    }

    /// The attractor point `ι_γ ω_Q`.
    pub fn attractor_point(&self, g: &DimensionVector) -> Result<Covector> {
        self.check_len(g)?;
        if g.is_zero() {
            return Err(Error::Domain("attractor point of the zero dimension vector".into()));
        }
        Ok(Covector::from_ints(&self.contract(&g.0)))
    }

    pub fn in_kernel(&self, g: &DimensionVector) -> bool {
        self.contract(&g.0).iter().all(|&a| a == 0)
    }

    /// `I = {i : ι_{s_i} ω_Q ≠ 0}`, derived from the skew matrix.
    pub fn index_set(&self) -> Vec<usize> {
        let b = self.skew_matrix();
        (0..self.vertex_count).filter(|&i| b[i].iter().any(|&x| x != 0)).collect()
    }

    /// Rank of `ω_Q`.
    pub fn skew_rank(&self) -> usize {
        linalg::rank(&self.skew_matrix())
    }

    /// Whether no `γ' ∈ N_Q^+` of total degree `<= bound`, non-collinear with
    /// `γ`, satisfies `θ(γ') = 0`. The verdict is relative to `bound`.
    pub fn is_gamma_general(&self, theta: &Covector, g: &DimensionVector, bound: u32) -> Result<bool> {
        self.check_len(g)?;
        if !theta.pair(g)?.is_zero() {
            return Err(Error::Precondition("θ(γ) must vanish".into()));
        }
        let mut general = true;
        for_each_effective(self.vertex_count, bound, &mut |h| {
            if general && !h.collinear(g) && theta.pair(h).map(|v| v.is_zero()).unwrap_or(false) {
                general = false;
            }
        });
        Ok(general)
    }
}

/// Visit every `γ ∈ N^+` with `n` entries and total degree `1..=bound`.
pub fn for_each_effective(n: usize, bound: u32, f: &mut dyn FnMut(&DimensionVector)) {
    fn rec(v: &mut Vec<i64>, i: usize, left: i64, f: &mut dyn FnMut(&DimensionVector)) {
        if i + 1 == v.len() {
            for a in 0..=left {
                v[i] = a;
                let d = DimensionVector(v.clone());
                if !d.is_zero() {
                    f(&d);
                }
            }
            v[i] = 0;
            return;
        }
        for a in 0..=left {
            v[i] = a;
            rec(v, i + 1, left - a, f);
        }
        v[i] = 0;
    }
    let mut v = vec![0; n];
    rec(&mut v, 0, bound as i64, f);
}

/// A single violated invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub code: String,
    pub message: String,
}

impl Issue {
    fn new(code: &str, message: impl Into<String>) -> Self {
        Issue { code: code.to_string(), message: message.into() }
    }
}

/// Diagnostics returned by the validators; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
    /// Order of `coker ψ` when it is finite (compatibility checks only).
    pub cokernel_order: Option<u64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }
}

/// A symplectic seed with a complete 2D fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticSeed {
    pub rank: usize,
    /// `e_i` for `i` in the index set, in increasing vertex order.
    pub e_vectors: Vec<Vec<i64>>,
    /// Gram matrix of `ω` on the standard basis of `N`.
    pub omega: Vec<Vec<i64>>,
    /// Counterclockwise primitive rays of a complete fan in `M_ℝ`.
    pub fan_rays: Vec<[i64; 2]>,
}

impl SymplecticSeed {
    /// Rank-2 seed with `ω = det` and the smooth fan generated by the `v_i` and the axes.
    pub fn planar(e_vectors: Vec<Vec<i64>>) -> Self {
        let mut s = SymplecticSeed { rank: 2, e_vectors, omega: vec![vec![0, 1], vec![-1, 0]], fan_rays: vec![] };
        let mut rays: Vec<[i64; 2]> = vec![[1, 0], [0, 1], [-1, 0], [0, -1]];
        for i in 0..s.e_vectors.len() {
            let v = s.v(i);
            if v.len() == 2 && (v[0] != 0 || v[1] != 0) {
                let p = linalg::primitive(&v);
                rays.push([p[0], p[1]]);
            }
        }
        s.fan_rays = smooth_fan(&rays);
        s
    }

    pub fn t_count(&self) -> usize {
        self.e_vectors.len()
    }

    /// `v_i = ι_{e_i} ω = ω(e_i, -)`.
    pub fn v(&self, i: usize) -> Vec<i64> {
        self.contract(&self.e_vectors[i])
    }

    /// `ι_n ω` for any `n ∈ N`.
    pub fn contract(&self, n: &[i64]) -> Vec<i64> {
        (0..self.rank).map(|j| (0..self.rank).map(|k| n[k] * self.omega[k][j]).sum()).collect()
    }

    pub fn omega_pair(&self, a: &[i64], b: &[i64]) -> i64 {
        linalg::dot(&self.contract(a), b)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_seed(self)
    }
}

/// Check the seed invariants: skew, nondegenerate, primitive `v_i`, complete 2D fan through every `v_i`.
pub fn validate_seed(seed: &SymplecticSeed) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = seed.rank;
    if seed.omega.len() != n || seed.omega.iter().any(|row| row.len() != n) {
        r.issues.push(Issue::new("dimension", "omega is not rank × rank"));
        return r;
    }
    if seed.e_vectors.iter().any(|e| e.len() != n) {
        r.issues.push(Issue::new("dimension", "an e-vector has the wrong length"));
        return r;
    }
    if (0..n).any(|i| (0..n).any(|j| seed.omega[i][j] != -seed.omega[j][i])) {
        r.issues.push(Issue::new("not_skew", "omega is not skew-symmetric"));
    }
    if linalg::det(&seed.omega).is_zero() {
        r.issues.push(Issue::new("degenerate", "degenerate skew form"));
    }
    for i in 0..seed.e_vectors.len() {
        let v = seed.v(i);
        if linalg::content(&v) != 1 {
            r.issues.push(Issue::new("non_primitive", format!("v_{} = {:?} is not primitive (|v_i|=1 fails)", i + 1, v)));
        }
    }
    if n != 2 {
        r.issues.push(Issue::new("fan_rank", "fans are supported in rank 2 only"));
        return r;
    }
    check_fan(&seed.fan_rays, &mut r);
    for i in 0..seed.e_vectors.len() {
        let v = seed.v(i);
        if v.iter().all(|&a| a == 0) {
            continue;
        }
        let p = linalg::primitive(&v);
        if !seed.fan_rays.contains(&[p[0], p[1]]) {
            r.issues.push(Issue::new("fan_missing_ray", format!("fan has no ray through v_{} = {:?}", i + 1, v)));
        }
    }
    r
}

fn check_fan(rays: &[[i64; 2]], r: &mut ValidationReport) {
    if rays.len() < 3 {
        r.issues.push(Issue::new("fan_incomplete", "fan not complete: fewer than three rays"));
        return;
    }
    for (k, ray) in rays.iter().enumerate() {
        if linalg::content(ray) != 1 {
            r.issues.push(Issue::new("fan_ray", format!("fan ray {k} {:?} is not primitive", ray)));
        }
        if rays[..k].contains(ray) {
            r.issues.push(Issue::new("fan_duplicate", format!("fan ray {:?} is repeated", ray)));
        }
    }
    let len = rays.len();
    let mut winding = 0;
    for k in 0..len {
        let a = rays[k];
        let b = rays[(k + 1) % len];
        if det2(a, b) <= 0 {
            r.issues.push(Issue::new(
                "fan_incomplete",
                format!("fan not complete or not counterclockwise between {:?} and {:?}", a, b),
            ));
        }
        if angle_cmp(a, b) != std::cmp::Ordering::Less {
            winding += 1;
        }
    }
    if winding != 1 {
        r.issues.push(Issue::new("fan_order", "fan rays do not wind exactly once counterclockwise"));
    }
}

/// Sort the rays counterclockwise, fill gaps of angle `>= π`, and subdivide every
/// 2D cone until it is unimodular.
pub fn smooth_fan(rays: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut rs: Vec<[i64; 2]> = rays
        .iter()
        .filter(|r| r[0] != 0 || r[1] != 0)
        .map(|r| {
            let p = linalg::primitive(r);
            [p[0], p[1]]
        })
        .collect();
    for axis in [[1, 0], [0, 1], [-1, 0], [0, -1]] {
        rs.push(axis);
    }
    rs.sort_by(|a, b| angle_cmp(*a, *b));
    rs.dedup();
    let mut out = Vec::new();
    let len = rs.len();
    for k in 0..len {
        let u = rs[k];
        let w = rs[(k + 1) % len];
        out.push(u);
        let mut a = u;
        while det2(a, w) > 1 {
            // In the basis (a, a') with det(a, a') = 1, w = α a + d a'.
            let ap = linalg::complete_basis(a);
            let d = det2(a, w);
            let alpha = det2(w, ap);
            let c = alpha.div_euclid(d) + 1;
            let p = [c * a[0] + ap[0], c * a[1] + ap[1]];
            out.push(p);
            a = p;
        }
    }
    out
}

/// A lattice map `ψ: N_Q → N`, stored as a `rank(N) × |Q_0|` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityMap {
    pub matrix: Vec<Vec<i64>>,
}

impl CompatibilityMap {
    /// `ψ(s_i) = e_i` on `I` and zero on the other vertices.
    pub fn from_seed(quiver: &Quiver, seed: &SymplecticSeed) -> Self {
        let index = quiver.index_set();
        let mut m = vec![vec![0; quiver.vertex_count()]; seed.rank];
        for (k, &i) in index.iter().enumerate() {
            if let Some(e) = seed.e_vectors.get(k) {
                for r in 0..seed.rank {
                    m[r][i] = e[r];
                }
            }
        }
        CompatibilityMap { matrix: m }
    }

    pub fn rank_n(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, g: &[i64]) -> Vec<i64> {
        self.matrix.iter().map(|row| linalg::dot(row, g)).collect()
    }

    /// Dual map `ψ^∨: M_ℝ → M_{Q,ℝ}`.
    pub fn dual(&self, x: &Covector) -> Covector {
        let n = self.matrix.first().map_or(0, Vec::len);
        Covector(
            (0..n)
                .map(|j| {
                    let col: Vec<i64> = self.matrix.iter().map(|row| row[j]).collect();
                    linalg::dot_q(&x.0, &col)
                })
                .collect(),
        )
    }

    /// Integer version of the dual map.
    pub fn dual_int(&self, x: &[i64]) -> Vec<i64> {
        let n = self.matrix.first().map_or(0, Vec::len);
        (0..n).map(|j| self.matrix.iter().zip(x).map(|(row, a)| row[j] * a).sum()).collect()
    }

    /// Solve `ψ^∨(x) = θ`, if `θ` lies in the image.
    pub fn dual_preimage(&self, theta: &Covector) -> Option<Covector> {
        let n = self.matrix.first().map_or(0, Vec::len);
        let t: Vec<Vec<i64>> = (0..n).map(|j| self.matrix.iter().map(|row| row[j]).collect()).collect();
        linalg::solve(&t, &theta.0).map(Covector)
    }
}

/// Check `ψ(s_i) = e_i` on `I`, `ψ^⋆ω = ω_Q`, rational surjectivity, and report `|coker ψ|`.
pub fn validate_compatibility(quiver: &Quiver, seed: &SymplecticSeed, psi: &CompatibilityMap) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = quiver.vertex_count();
    if psi.matrix.len() != seed.rank || psi.matrix.iter().any(|row| row.len() != n) {
        r.issues.push(Issue::new("dimension", "ψ must be a rank(N) × |Q_0| matrix"));
        return r;
    }
    let index = quiver.index_set();
    if index.len() != seed.e_vectors.len() {
        r.issues.push(Issue::new(
            "index_set",
            format!("seed has {} e-vectors but I has {} elements", seed.e_vectors.len(), index.len()),
        ));
    } else {
        for (k, &i) in index.iter().enumerate() {
            let img = psi.apply(&DimensionVector::simple(n, i).0);
            if img != seed.e_vectors[k] {
                r.issues.push(Issue::new("psi_simple", format!("ψ(s_{}) = {:?} ≠ e_{}", i + 1, img, i + 1)));
            }
        }
    }
    let b = quiver.skew_matrix();
    let mut pulled_back = true;
    for a in 0..n {
        for c in 0..n {
            let pa = psi.apply(&DimensionVector::simple(n, a).0);
            let pc = psi.apply(&DimensionVector::simple(n, c).0);
            if seed.omega_pair(&pa, &pc) != b[a][c] {
                pulled_back = false;
            }
        }
    }
    if !pulled_back {
        r.issues.push(Issue::new("pullback_form", "ψ⋆ω ≠ ω_Q"));
    }
    if linalg::rank(&psi.matrix) != seed.rank {
        r.issues.push(Issue::new("not_surjective", "ψ ⊗ ℚ is not surjective (infinite cokernel)"));
    } else {
        r.cokernel_order = linalg::maximal_minor_gcd(&psi.matrix).to_u64();
    }
    r
}

//! Walls, scattering diagrams, path-ordered products, consistency and
//! order-by-order completion.
//!
//! Both sides share one engine. A wall carries a support cone, a primitive
//! lattice direction and a function. What differs between the quiver side
//! and the seed side is captured by [`Context`]: where the "point" of an
//! exponent sits (the attractor point `ι_γ ω_Q`, resp. the monomial `m`
//! itself) and how a crossing turns into an exponent of the wall function.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, angle_cmp, det2};
use crate::series::{apply_wall_crossing, Exponent, Q, Series, Shape};

/// Lattice data the diagram lives over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Context {
    /// Quiver side: exponents in `N_Q^+`, points in `M_{Q,ℝ}`, `skew[i][j] = ω_Q(s_i, s_j)`.
    Quiver { skew: Vec<Vec<i64>> },
    /// Seed side: exponents `(m, A)`, points in `M_ℝ`; `v[i] = ι_{e_i} ω`.
    Seed { rank: usize, v: Vec<Vec<i64>> },
}

impl Context {
    pub fn shape(&self) -> Shape {
        match self {
            Context::Quiver { skew } => Shape::quiver(skew.len()),
            Context::Seed { rank, v } => Shape::seed(*rank, v.len()),
        }
    }

    /// Dimension of the space holding supports and sample points.
    pub fn ambient_rank(&self) -> usize {
        match self {
            Context::Quiver { skew } => skew.len(),
            Context::Seed { rank, .. } => *rank,
        }
    }

    pub fn is_quiver(&self) -> bool {
        matches!(self, Context::Quiver { .. })
    }

    /// `ι_γ ω_Q` as integer coordinates (quiver side only).
    pub fn contract(&self, g: &[i64]) -> Vec<i64> {
        match self {
            Context::Quiver { skew } => {
                let n = skew.len();
                (0..n).map(|j| (0..n).map(|i| g[i] * skew[i][j]).sum()).collect()
            }
            Context::Seed { .. } => g.to_vec(),
        }
    }

    /// The point attached to an exponent: the attractor point on the quiver
    /// side, the lattice part `m` on the seed side.
    pub fn point_of(&self, lattice: &[i64]) -> Vec<i64> {
        self.contract(lattice)
    }

    /// Linear form `L` on lattice exponents such that crossing `wall` with the
    /// given velocity acts by `z^e -> f^{L(e)} z^e`.
    pub fn crossing_form(&self, wall: &Wall, velocity: &[i64]) -> Result<Vec<i64>> {
        match self {
            Context::Quiver { .. } => {
                let s = linalg::dot(&wall.direction, velocity).signum();
                if s == 0 {
                    return Err(Error::NonTransverse(0));
                }
                Ok(self.contract(&wall.direction).into_iter().map(|a| s * a).collect())
            }
            Context::Seed { .. } => {
                let n = linalg::primitive(&wall.support.normal);
                let s = linalg::dot(&n, velocity);
                if s == 0 {
                    return Err(Error::NonTransverse(0));
                }
                Ok(if s > 0 { n.into_iter().map(|a| -a).collect() } else { n })
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Context::Quiver { skew } => json!({ "side": "quiver", "skew": skew }),
            Context::Seed { rank, v } => json!({ "side": "seed", "rank": rank, "v": v }),
        }
    }

    fn from_json(v: &Value) -> Result<Context> {
        let bad = |f: &str| Error::Invalid(format!("diagram context: bad field `{f}`"));
        match v.get("side").and_then(Value::as_str) {
            Some("quiver") => {
                let skew = serde_json::from_value(v.get("skew").cloned().ok_or_else(|| bad("skew"))?)
                    .map_err(|_| bad("skew"))?;
                Ok(Context::Quiver { skew })
            }
            Some("seed") => {
                let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(|| bad("rank"))? as usize;
                let vv = serde_json::from_value(v.get("v").cloned().ok_or_else(|| bad("v"))?).map_err(|_| bad("v"))?;
                Ok(Context::Seed { rank, v: vv })
            }
            _ => Err(bad("side")),
        }
    }
}

/// A polyhedral cone `{x : n·x = 0, h·x >= 0 for all h}`; always contains the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub normal: Vec<i64>,
    pub halfspaces: Vec<Vec<i64>>,
}

impl Cone {
    /// The full hyperplane `normal^⊥`.
    pub fn hyperplane(normal: &[i64]) -> Self {
        Cone { normal: normal.to_vec(), halfspaces: vec![] }
    }

    /// The ray `ℝ_{>=0} p` in the plane.
    pub fn ray(p: [i64; 2]) -> Self {
        let p = prim2(p);
        Cone { normal: vec![p[1], -p[0]], halfspaces: vec![vec![p[0], p[1]]] }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        linalg::dot(&self.normal, x) == 0 && self.halfspaces.iter().all(|h| linalg::dot(h, x) >= 0)
    }

    /// `x` lies on the relative boundary (some defining half-space is tight).
    pub fn on_boundary(&self, x: &[i64]) -> bool {
        self.contains(x) && self.halfspaces.iter().any(|h| linalg::dot(h, x) == 0)
    }

    /// Primitive ray generators of a one-dimensional cone in the plane.
    pub fn rays2(&self) -> Vec<[i64; 2]> {
        if self.normal.len() != 2 || (self.normal[0] == 0 && self.normal[1] == 0) {
            return vec![];
        }
        let p = prim2([-self.normal[1], self.normal[0]]);
        let mut out = Vec::new();
        for c in [p, [-p[0], -p[1]]] {
            if self.halfspaces.iter().all(|h| linalg::dot(h, &c) >= 0) {
                out.push(c);
            }
        }
        if out.len() == 2 && self.halfspaces.iter().any(|h| linalg::dot(h, &p) != 0) {
            out.clear();
        }
        out
    }

    /// Normalised description used to detect identical supports.
    fn key(&self) -> Vec<Vec<i64>> {
        if self.normal.len() == 2 {
            let mut r: Vec<Vec<i64>> = self.rays2().iter().map(|a| a.to_vec()).collect();
            r.sort();
            r.insert(0, vec![2]);
            return r;
        }
        let mut n = linalg::primitive(&self.normal);
        if n.iter().find(|&&a| a != 0).is_some_and(|&a| a < 0) {
            n = n.into_iter().map(|a| -a).collect();
        }
        let mut hs: Vec<Vec<i64>> = self.halfspaces.iter().map(|h| linalg::primitive(h)).collect();
        hs.sort();
        hs.dedup();
        let mut out = vec![n];
        out.extend(hs);
        out
    }

    fn to_json(&self) -> Value {
        let mut v = json!({ "normal": self.normal, "halfspaces": self.halfspaces });
        if self.normal.len() == 2 {
            v["rays"] = json!(self.rays2());
        }
        v
    }

    fn from_json(v: &Value) -> Result<Cone> {
        let bad = || Error::Invalid("wall support: expected `normal` and `halfspaces`".into());
        let normal = serde_json::from_value(v.get("normal").cloned().ok_or_else(bad)?).map_err(|_| bad())?;
        let halfspaces = serde_json::from_value(v.get("halfspaces").cloned().ok_or_else(bad)?).map_err(|_| bad())?;
        Ok(Cone { normal, halfspaces })
    }
}

pub(crate) fn prim2(p: [i64; 2]) -> [i64; 2] {
    let v = linalg::primitive(&p);
    [v[0], v[1]]
}

/// Provenance tag of a wall.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WallTag {
    Initial,
    Added,
    Central,
}

impl WallTag {
    fn as_str(self) -> &'static str {
        match self {
            WallTag::Initial => "initial",
            WallTag::Added => "added",
            WallTag::Central => "central",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "initial" => Some(WallTag::Initial),
            "added" => Some(WallTag::Added),
            "central" => Some(WallTag::Central),
            _ => None,
        }
    }
}

/// A wall: support, primitive direction and function.
#[derive(Clone, Debug, PartialEq)]
pub struct Wall {
    pub support: Cone,
    /// `γ_𝔡 ∈ N_Q^+` on the quiver side, `m_0 ∈ M` on the seed side.
    pub direction: Vec<i64>,
    pub function: Series,
    pub tag: WallTag,
    /// Vertex or `t`-index for initial walls; used as a loop tie-break.
    pub label: Option<usize>,
}

impl Wall {
    pub fn new(support: Cone, direction: Vec<i64>, function: Series, tag: WallTag) -> Self {
        Wall { support, direction, function, tag, label: None }
    }

    pub fn with_label(mut self, l: usize) -> Self {
        self.label = Some(l);
        self
    }

    fn to_json(&self) -> Value {
        json!({
            "support": self.support.to_json(),
            "direction": self.direction,
            "tag": self.tag.as_str(),
            "label": self.label,
            "function": self.function.to_json(),
        })
    }
}

/// A finite list of walls trusted up to `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    pub context: Context,
    pub walls: Vec<Wall>,
    pub order: u32,
}

/// Quiver side: the attractor point of the direction lies in the support.
/// Seed side: the monomial `m_0` lies in the support.
pub fn is_incoming(context: &Context, wall: &Wall) -> bool {
    wall.support.contains(&context.point_of(&wall.direction))
}

/// A wall is central when its direction lies in `ker ω_Q`.
pub fn is_central(context: &Context, wall: &Wall) -> Result<bool> {
    match context {
        Context::Quiver { .. } => Ok(context.contract(&wall.direction).iter().all(|&a| a == 0)),
        Context::Seed { .. } => Err(Error::Domain("central walls exist on the quiver side only".into())),
    }
}

/// One transverse crossing of a path with a wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub wall: usize,
    pub point: Vec<i64>,
    pub velocity: Vec<i64>,
}

/// Ring automorphism fixing the `t` variables, stored by the multipliers
/// `z^{b_j} -> g_j z^{b_j}` of the standard lattice generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    shape: Shape,
    order: u32,
    mults: Vec<Series>,
}

impl Automorphism {
    pub fn identity(shape: &Shape, order: u32) -> Self {
        Automorphism { shape: shape.clone(), order, mults: vec![Series::one(shape, order); shape.lattice_rank] }
    }

    /// `z^e -> f^{L(e)} z^e`.
    pub fn elementary(f: &Series, form: &[i64]) -> Result<Self> {
        let mults = form.iter().map(|&l| f.int_pow(l)).collect::<Result<Vec<_>>>()?;
        Ok(Automorphism { shape: f.shape().clone(), order: f.order(), mults })
    }

    pub fn multipliers(&self) -> &[Series] {
        &self.mults
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.mults.iter().all(Series::is_one)
    }

    /// Lowest degree at which some multiplier differs from 1.
    pub fn defect_degree(&self) -> Option<i64> {
        self.mults.iter().filter_map(Series::lowest_nontrivial_degree).min()
    }

    /// Image of a series.
    pub fn apply(&self, s: &Series) -> Result<Series> {
        let mut cache: HashMap<(usize, i64), Series> = HashMap::new();
        let mut out = Series::zero(&self.shape, self.order.min(s.order()));
        for (e, c) in s.terms() {
            let mut m = Series::monomial(&self.shape, out.order(), e.clone(), c.clone());
            for (j, &k) in e.lattice.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let p = match cache.get(&(j, k)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = self.mults[j].int_pow(k)?;
                        cache.insert((j, k), p.clone());
                        p
                    }
                };
                m = m.mul(&p)?;
            }
            out = out.add(&m)?;
        }
        Ok(out)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Automorphism) -> Result<Automorphism> {
        let mut mults = Vec::with_capacity(self.mults.len());
        for (g_self, g_first) in self.mults.iter().zip(&first.mults) {
            mults.push(g_self.mul(&self.apply(g_first)?)?);
        }
        Ok(Automorphism { shape: self.shape.clone(), order: self.order.min(first.order), mults })
    }

    /// Replace `self` by `θ ∘ self` where `θ: z^e -> f^{L(e)} z^e`.
    fn push_elementary(&mut self, f: &Series, form: &[i64]) -> Result<()> {
        let f = f.truncate(self.order);
        for (j, g) in self.mults.iter_mut().enumerate() {
            let moved = apply_wall_crossing(g, &f, |e| linalg::dot(form, &e.lattice))?;
            *g = f.int_pow(form[j])?.mul(&moved)?;
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        // Unipotent: invert by fixed-point iteration on the multipliers.
        let mut inv = Automorphism::identity(&self.shape, self.order);
        for _ in 0..=self.order {
            let comp = self.after(&inv)?;
            let mut next = Vec::new();
            for (gi, gc) in inv.mults.iter().zip(&comp.mults) {
                next.push(gi.mul(&gc.int_pow(-1)?)?);
            }
            inv.mults = next;
        }
        Ok(inv)
    }
}

/// Outcome of a loop check.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub order: u32,
    /// Lowest degree with a nonzero defect, if any.
    pub defect_degree: Option<u32>,
    /// Defect terms `(generator, exponent, coefficient)` at that degree.
    pub defect_terms: Vec<(usize, Exponent, Q)>,
}

impl Diagram {
    pub fn new(context: Context, order: u32) -> Self {
        Diagram { context, walls: vec![], order }
    }

    pub fn shape(&self) -> Shape {
        self.context.shape()
    }

    /// Walls truncated to a lower order.
    pub fn truncate(&self, order: u32) -> Diagram {
        let order = order.min(self.order);
        Diagram {
            context: self.context.clone(),
            walls: self
                .walls
                .iter()
                .map(|w| Wall { function: w.function.truncate(order), ..w.clone() })
                .collect(),
            order,
        }
    }

    /// Indices of walls containing `x`; errors when `x` is singular.
    pub fn walls_through(&self, x: &[i64]) -> Result<Vec<usize>> {
        if x.len() != self.context.ambient_rank() {
            return Err(Error::Dimension { expected: self.context.ambient_rank(), got: x.len() });
        }
        let hits: Vec<usize> = (0..self.walls.len()).filter(|&k| self.walls[k].support.contains(x)).collect();
        let mut bad: Vec<usize> = hits.iter().copied().filter(|&k| self.walls[k].support.on_boundary(x)).collect();
        for (a, &i) in hits.iter().enumerate() {
            for &j in &hits[a + 1..] {
                if !parallel(&self.walls[i].support.normal, &self.walls[j].support.normal) {
                    bad.push(i);
                    bad.push(j);
                }
            }
        }
        if x.iter().all(|&a| a == 0) && !self.walls.is_empty() {
            bad.extend(0..self.walls.len());
        }
        if !bad.is_empty() {
            bad.sort_unstable();
            bad.dedup();
            return Err(Error::Singular { walls: bad });
        }
        Ok(hits)
    }

    /// `f_{𝔇,x}`: product of the functions of all walls containing `x`.
    pub fn chamber_function(&self, x: &[i64]) -> Result<Series> {
        let mut f = Series::one(&self.shape(), self.order);
        for k in self.walls_through(x)? {
            f = f.mul(&self.walls[k].function)?;
        }
        Ok(f)
    }

    /// Same as [`Diagram::chamber_function`], restricted to walls with the given tag.
    pub fn chamber_function_tagged(&self, x: &[i64], tag: WallTag) -> Result<Series> {
        let mut f = Series::one(&self.shape(), self.order);
        for k in self.walls_through(x)? {
            if self.walls[k].tag == tag {
                f = f.mul(&self.walls[k].function)?;
            }
        }
        Ok(f)
    }

    /// Compose the crossings in path order (first crossing applied first).
    pub fn path_ordered_product(&self, path: &[Crossing]) -> Result<Automorphism> {
        self.product_at(path, self.order)
    }

    fn product_at(&self, path: &[Crossing], order: u32) -> Result<Automorphism> {
        let shape = self.shape();
        let mut p = Automorphism::identity(&shape, order);
        for c in path {
            let wall = self.walls.get(c.wall).ok_or_else(|| Error::Invalid(format!("no wall {}", c.wall)))?;
            if !wall.support.contains(&c.point) {
                return Err(Error::Invalid(format!("crossing point {:?} is not on wall {}", c.point, c.wall)));
            }
            let form = self.context.crossing_form(wall, &c.velocity).map_err(|e| match e {
                Error::NonTransverse(_) => Error::NonTransverse(c.wall),
                e => e,
            })?;
            p.push_elementary(&wall.function, &form)?;
        }
        Ok(p)
    }

    /// The counterclockwise loop around the origin (ambient rank 2).
    ///
    /// Crossings are sorted by angle; coincident supports are ordered initial
    /// before added, then by label. Walls on a common ray commute, so the
    /// tie-break does not change the product.
    pub fn central_loop(&self) -> Result<Vec<Crossing>> {
        if self.context.ambient_rank() != 2 {
            return Err(Error::Unsupported("a single central loop exists in ambient rank 2 only".into()));
        }
        let mut events: Vec<([i64; 2], WallTag, usize, usize)> = Vec::new();
        for (k, w) in self.walls.iter().enumerate() {
            for r in w.support.rays2() {
                events.push((r, w.tag, w.label.unwrap_or(usize::MAX), k));
            }
        }
        events.sort_by(|a, b| angle_cmp(a.0, b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)));
        Ok(events
            .into_iter()
            .map(|(r, _, _, k)| Crossing { wall: k, point: r.to_vec(), velocity: vec![-r[1], r[0]] })
            .collect())
    }

    /// Evaluate the loop around the origin modulo `𝔪^{order+1}`.
    pub fn check_consistency(&self) -> Result<ConsistencyReport> {
        let path = self.central_loop()?;
        let p = self.product_at(&path, self.order)?;
        let deg = p.defect_degree();
        let mut defect_terms = Vec::new();
        if let Some(d) = deg {
            for (j, g) in p.multipliers().iter().enumerate() {
                for (e, c) in g.homogeneous_part(d).sorted_terms() {
                    defect_terms.push((j, e.clone(), c.clone()));
                }
            }
        }
        Ok(ConsistencyReport {
            consistent: deg.is_none(),
            order: self.order,
            defect_degree: deg.map(|d| d as u32),
            defect_terms,
        })
    }

    /// Drop the central walls (quiver side only).
    pub fn remove_central_walls(&self) -> Result<Diagram> {
        let mut out = Diagram::new(self.context.clone(), self.order);
        for w in &self.walls {
            if w.tag != WallTag::Central && !is_central(&self.context, w)? {
                out.walls.push(w.clone());
            }
        }
        Ok(out)
    }

    /// Merge walls with equal support, direction and tag; drop trivial walls;
    /// sort deterministically.
    pub fn canonical(&self) -> Result<Diagram> {
        let mut groups: BTreeMap<(WallTag, Vec<Vec<i64>>, Vec<i64>), (Wall, Option<usize>)> = BTreeMap::new();
        for w in &self.walls {
            let key = (w.tag, w.support.key(), w.direction.clone());
            match groups.get_mut(&key) {
                Some((acc, label)) => {
                    acc.function = acc.function.mul(&w.function)?;
                    if *label != w.label {
                        *label = None;
                    }
                }
                None => {
                    groups.insert(key, (w.clone(), w.label));
                }
            }
        }
        let walls = groups
            .into_values()
            .map(|(mut w, l)| {
                w.label = l;
                w
            })
            .filter(|w| !w.function.is_one())
            .collect();
        Ok(Diagram { context: self.context.clone(), walls, order: self.order })
    }

    /// Order-by-order completion in ambient rank 2.
    pub fn complete(&self, order: u32) -> Result<Diagram> {
        complete(self, order)
    }

    pub fn to_json(&self) -> Value {
        let walls: Vec<Value> = self.walls.iter().map(Wall::to_json).collect();
        json!({ "context": self.context.to_json(), "order": self.order, "walls": walls })
    }

    pub fn from_json(v: &Value) -> Result<Diagram> {
        let context = Context::from_json(v.get("context").ok_or_else(|| Error::Invalid("diagram: missing `context`".into()))?)?;
        let order = v.get("order").and_then(Value::as_u64).ok_or_else(|| Error::Invalid("diagram: missing `order`".into()))? as u32;
        let shape = context.shape();
        let mut d = Diagram::new(context, order);
        for (k, w) in v.get("walls").and_then(Value::as_array).into_iter().flatten().enumerate() {
            let bad = |f: &str| Error::Invalid(format!("wall {k}: bad field `{f}`"));
            let support = Cone::from_json(w.get("support").ok_or_else(|| bad("support"))?)?;
            let direction = serde_json::from_value(w.get("direction").cloned().ok_or_else(|| bad("direction"))?)
                .map_err(|_| bad("direction"))?;
            let tag = w.get("tag").and_then(Value::as_str).and_then(WallTag::parse).ok_or_else(|| bad("tag"))?;
            let label = w.get("label").and_then(Value::as_u64).map(|l| l as usize);
            let function = Series::from_json(&shape, w.get("function").ok_or_else(|| bad("function"))?)?;
            d.walls.push(Wall { support, direction, function, tag, label });
        }
        Ok(d)
    }
}

fn parallel(a: &[i64], b: &[i64]) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| a[i] * b[j] == a[j] * b[i]))
}

/// Walls added at one degree, as `(ray, direction, exponent, coefficient)`.
type Correction = ([i64; 2], Vec<i64>, Exponent, Q);

/// Complete `initial` to a diagram consistent modulo `𝔪^{order+1}`, adding
/// only non-incoming walls.
///
/// At degree `n` the loop product is the identity below degree `n`, so its
/// degree-`n` part is additive. Each exponent `e` of that part is cancelled by
/// a wall `1 + κ z^e` on the ray `ℝ_{>=0}(-point(e))`.
pub fn complete(initial: &Diagram, order: u32) -> Result<Diagram> {
    if initial.context.ambient_rank() != 2 {
        return Err(Error::Unsupported(
            "completion in ambient rank >= 3 needs the experimental joint mode, which is not built in".into(),
        ));
    }
    for (k, w) in initial.walls.iter().enumerate() {
        if !w.function.is_unipotent() {
            return Err(Error::NonUnit(format!("initial wall {k} does not have constant term 1")));
        }
    }
    let mut d = Diagram {
        context: initial.context.clone(),
        walls: initial.walls.iter().map(|w| Wall { function: w.function.truncate(order), ..w.clone() }).collect(),
        order,
    };
    let mut added: HashMap<([i64; 2], Vec<i64>), usize> = HashMap::new();
    for (k, w) in d.walls.iter().enumerate() {
        if w.tag == WallTag::Added {
            if let [r] = w.support.rays2().as_slice() {
                added.insert((*r, w.direction.clone()), k);
            }
        }
    }
    let shape = d.shape();
    for n in 1..=order {
        let corrections = degree_corrections(&d, n)?;
        for (ray, dir, e, kappa) in corrections {
            let f = Series::from_terms(&shape, order, [(Exponent::zero(&shape), Q::one()), (e, kappa)]);
            match added.get(&(ray, dir.clone())) {
                Some(&k) => d.walls[k].function = d.walls[k].function.mul(&f)?,
                None => {
                    added.insert((ray, dir.clone()), d.walls.len());
                    d.walls.push(Wall::new(Cone::ray(ray), dir, f, WallTag::Added));
                }
            }
        }
    }
    Ok(d)
}

fn degree_corrections(d: &Diagram, n: u32) -> Result<Vec<Correction>> {
    let path = d.central_loop()?;
    let p = d.product_at(&path, n)?;
    if let Some(low) = p.defect_degree() {
        if low < n as i64 {
            return Err(Error::Invalid(format!("loop defect at degree {low} survived completion")));
        }
    }
    let mut by_exp: BTreeMap<Exponent, Vec<Q>> = BTreeMap::new();
    let rank = p.multipliers().len();
    for (j, g) in p.multipliers().iter().enumerate() {
        for (e, c) in g.homogeneous_part(n as i64).terms() {
            by_exp.entry(e.clone()).or_insert_with(|| vec![Q::zero(); rank])[j] = c.clone();
        }
    }
    let mut out = Vec::new();
    for (e, delta) in by_exp {
        let point = d.context.point_of(&e.lattice);
        if point.iter().all(|&a| a == 0) {
            return Err(Error::Invalid(format!("defect on exponent {e} has no outgoing ray")));
        }
        let ray = prim2([-point[0], -point[1]]);
        let dir = linalg::primitive(&e.lattice);
        let probe = Wall::new(Cone::ray(ray), dir.clone(), Series::one(&d.shape(), n), WallTag::Added);
        let form = d.context.crossing_form(&probe, &[-ray[1], ray[0]])?;
        let j = (0..rank).find(|&j| form[j] != 0).ok_or_else(|| Error::Invalid("degenerate crossing form".into()))?;
        let kappa = -delta[j].clone() / Q::from_integer(form[j].into());
        for j in 0..rank {
            if delta[j].clone() + kappa.clone() * Q::from_integer(form[j].into()) != Q::zero() {
                return Err(Error::Invalid(format!("defect on exponent {e} is not a single wall crossing")));
            }
        }
        out.push((ray, dir, e, kappa));
    }
    Ok(out)
}

/// Result of an equivalence test.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub samples: Vec<Vec<i64>>,
    /// First disagreeing sample point with both chamber functions.
    pub mismatch: Option<(Vec<i64>, Series, Series)>,
}

/// One point on every ray of the common support and one inside every sector (rank 2).
pub fn sample_points(diagrams: &[&Diagram]) -> Result<Vec<Vec<i64>>> {
    let mut rays: Vec<[i64; 2]> = Vec::new();
    for d in diagrams {
        if d.context.ambient_rank() != 2 {
            return Err(Error::Unsupported("equivalence sampling is implemented in ambient rank 2".into()));
        }
        for w in &d.walls {
            rays.extend(w.support.rays2());
        }
    }
    rays.sort_by(|a, b| angle_cmp(*a, *b));
    rays.dedup();
    let mut pts: Vec<Vec<i64>> = rays.iter().map(|r| r.to_vec()).collect();
    match rays.len() {
        0 => pts.push(vec![1, 0]),
        1 => pts.push(vec![-rays[0][0], -rays[0][1]]),
        len => {
            for k in 0..len {
                let a = rays[k];
                let b = rays[(k + 1) % len];
                let dt = det2(a, b);
                let mid = if dt > 0 {
                    [a[0] + b[0], a[1] + b[1]]
                } else if dt == 0 {
                    [-a[1], a[0]]
                } else {
                    [-a[0] - b[0], -a[1] - b[1]]
                };
                pts.push(mid.to_vec());
            }
        }
    }
    Ok(pts)
}

/// Random integer point in `[-bound, bound]^r`, redrawn until it is nonzero
/// and outside `Sing` of every given diagram.
pub fn certified_point<R: rand::Rng>(diagrams: &[&Diagram], rng: &mut R, bound: i64) -> Result<Vec<i64>> {
    let r = diagrams.first().map_or(2, |d| d.context.ambient_rank());
    for _ in 0..10_000 {
        let x: Vec<i64> = (0..r).map(|_| rng.gen_range(-bound..=bound)).collect();
        if x.iter().all(|&a| a == 0) {
            continue;
        }
        if diagrams.iter().all(|d| d.walls_through(&x).is_ok()) {
            return Ok(x);
        }
    }
    Err(Error::Invalid("no certified sample point found".into()))
}

/// Compare chamber functions at a certified sample of every cell.
pub fn equivalent(d1: &Diagram, d2: &Diagram) -> Result<EquivalenceReport> {
    if d1.context.shape() != d2.context.shape() {
        return Err(Error::ContextMismatch);
    }
    let samples = sample_points(&[d1, d2])?;
    let order = d1.order.min(d2.order);
    for x in &samples {
        let f1 = d1.chamber_function(x)?.truncate(order);
        let f2 = d2.chamber_function(x)?.truncate(order);
        if f1 != f2 {
            return Ok(EquivalenceReport { equivalent: false, samples: samples.clone(), mismatch: Some((x.clone(), f1, f2)) });
        }
    }
    Ok(EquivalenceReport { equivalent: true, samples, mismatch: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qi;

    fn seed_m1() -> Diagram {
        let ctx = Context::Seed { rank: 2, v: vec![vec![0, 1], vec![-1, 0]] };
        let sh = ctx.shape();
        let mut d = Diagram::new(ctx, 4);
        d.walls.push(
            Wall::new(Cone::hyperplane(&[1, 0]), vec![0, 1], Series::binomial(&sh, 4, Exponent::new(&[0, 1], &[1, 0])), WallTag::Initial)
                .with_label(0),
        );
        d.walls.push(
            Wall::new(Cone::hyperplane(&[0, 1]), vec![-1, 0], Series::binomial(&sh, 4, Exponent::new(&[-1, 0], &[0, 1])), WallTag::Initial)
                .with_label(1),
        );
        d
    }

    fn kronecker1() -> Diagram {
        let ctx = Context::Quiver { skew: vec![vec![0, 1], vec![-1, 0]] };
        let sh = ctx.shape();
        let mut d = Diagram::new(ctx, 4);
        for i in 0..2 {
            let mut s = vec![0, 0];
            s[i] = 1;
            d.walls.push(
                Wall::new(Cone::hyperplane(&s), s.clone(), Series::binomial(&sh, 4, Exponent::lattice(&s)), WallTag::Initial)
                    .with_label(i),
            );
        }
        d
    }

    #[test]
    fn seed_pentagon() {
        let c = seed_m1().complete(4).unwrap();
        let added: Vec<&Wall> = c.walls.iter().filter(|w| w.tag == WallTag::Added).collect();
        assert_eq!(added.len(), 1, "{:?}", added);
        assert_eq!(added[0].support.rays2(), vec![[1, -1]]);
        let sh = c.shape();
        assert_eq!(added[0].function, Series::binomial(&sh, 4, Exponent::new(&[-1, 1], &[1, 1])));
        assert!(c.check_consistency().unwrap().consistent);
    }

    #[test]
    fn quiver_pentagon() {
        let c = kronecker1().complete(4).unwrap();
        let added: Vec<&Wall> = c.walls.iter().filter(|w| w.tag == WallTag::Added).collect();
        assert_eq!(added.len(), 1, "{:?}", added);
        assert_eq!(added[0].support.rays2(), vec![[1, -1]]);
        assert_eq!(added[0].function.coefficient(&Exponent::lattice(&[1, 1])), qi(1));
        assert_eq!(added[0].function.len(), 2);
        assert!(c.check_consistency().unwrap().consistent);
    }

    #[test]
    fn singular_and_chamber() {
        let d = seed_m1();
        assert!(matches!(d.chamber_function(&[0, 0]), Err(Error::Singular { .. })));
        assert_eq!(d.chamber_function(&[0, 3]).unwrap(), d.walls[0].function);
        assert!(d.chamber_function(&[1, 1]).unwrap().is_one());
    }
}

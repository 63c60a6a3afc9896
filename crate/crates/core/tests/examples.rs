mod common;

use wallcross::correspondence::{self, gamma_of_chern, local_p2_sheaf_dt, pullback, verify_comparison, verify_main, SeedRoute};
use wallcross::hdtv::{curve_class, gw_combination, hdtv_diagram, initial_hdtv_diagram, split_in_out};
use wallcross::lattice::{Covector, DimensionVector, Quiver, SymplecticSeed};
use wallcross::quiver_dt::{initial_cluster_diagram, positivity_audit, DtEngine, ChamberNote};
use wallcross::scattering::{equivalent, is_incoming, Cone, Context, Crossing, Diagram, Wall, WallTag};
use wallcross::series::{qi, Exponent, Series, Q};
use wallcross::Error;

fn completed(m: u32, order: u32) -> Diagram {
    initial_cluster_diagram(&Quiver::kronecker(m), order).unwrap().complete(order).unwrap()
}

fn local_p2_quiver() -> Quiver {
    Quiver::from_arrows(3, &[(0, 1, 3), (1, 2, 3), (2, 0, 3)], true).unwrap()
}

fn seed_exp(v: &[i64], t: &[u32]) -> Exponent {
    Exponent::new(v, t)
}

// scattering

#[test]
fn initial_walls_are_incoming() {
    let q = initial_cluster_diagram(&Quiver::kronecker(2), 4).unwrap();
    assert!(q.walls.iter().all(|w| is_incoming(&q.context, w)));
    let s = initial_hdtv_diagram(&correspondence::local_p2().unwrap().seed, 4).unwrap();
    assert!(s.walls.iter().all(|w| is_incoming(&s.context, w)));
}

#[test]
fn wall_on_opposite_ray_is_not_incoming() {
    let ctx = Context::Seed { rank: 2, v: vec![vec![0, 1], vec![-1, 0]] };
    let sh = ctx.shape();
    let f = Series::binomial(&sh, 3, seed_exp(&[-1, 1], &[1, 1]));
    let w = Wall::new(Cone::ray([1, -1]), vec![-1, 1], f, WallTag::Added);
    assert!(!is_incoming(&ctx, &w));
}

#[test]
fn central_wall_removed() {
    let q = local_p2_quiver();
    let mut d = initial_cluster_diagram(&q, 3).unwrap();
    let sh = d.shape();
    let g = vec![1, 1, 1];
    d.walls.push(Wall::new(Cone::hyperplane(&g), g.clone(), Series::binomial(&sh, 3, Exponent::lattice(&g)), WallTag::Added));
    let r = d.remove_central_walls().unwrap();
    assert_eq!(r.walls.len(), 3);
    let again = r.remove_central_walls().unwrap();
    assert_eq!(again, r);
}

#[test]
fn removing_central_walls_keeps_consistency() {
    let d = completed(2, 5);
    assert!(d.remove_central_walls().unwrap().check_consistency().unwrap().consistent);
}

#[test]
fn chamber_functions_of_completed_kronecker() {
    for m in 1..=3 {
        let d = completed(m, 6);
        let sh = d.shape();
        for (x, s) in [([0, 1], [1, 0]), ([0, -1], [1, 0]), ([1, 0], [0, 1]), ([-1, 0], [0, 1])] {
            assert_eq!(d.chamber_function(&x).unwrap(), Series::binomial(&sh, 6, Exponent::lattice(&s)), "m = {m}, x = {x:?}");
        }
        assert!(d.chamber_function(&[1, 1]).unwrap().is_one());
    }
    let d = completed(1, 6);
    let f = d.chamber_function(&[1, -1]).unwrap();
    assert_eq!(f, Series::binomial(&d.shape(), 6, Exponent::lattice(&[1, 1])));
}

#[test]
fn crossing_back_is_identity() {
    let d = completed(2, 4);
    let there = Crossing { wall: 0, point: vec![0, 1], velocity: vec![-1, 0] };
    let back = Crossing { wall: 0, point: vec![0, 1], velocity: vec![1, 0] };
    assert!(d.path_ordered_product(&[there, back]).unwrap().is_identity());
}

#[test]
fn commuting_walls_in_either_order() {
    let ctx = Context::Quiver { skew: vec![vec![0, 0, 1], vec![0, 0, 1], vec![-1, -1, 0]] };
    let sh = ctx.shape();
    let mut d = Diagram::new(ctx, 4);
    for g in [vec![1, 0, 0], vec![0, 1, 0]] {
        d.walls.push(Wall::new(Cone::hyperplane(&g), g.clone(), Series::binomial(&sh, 4, Exponent::lattice(&g)), WallTag::Initial));
    }
    let x = vec![0, 0, 1];
    let a = Crossing { wall: 0, point: x.clone(), velocity: vec![-1, 0, 0] };
    let b = Crossing { wall: 1, point: x.clone(), velocity: vec![0, -1, 0] };
    let ab = d.path_ordered_product(&[a.clone(), b.clone()]).unwrap();
    let ba = d.path_ordered_product(&[b, a]).unwrap();
    assert_eq!(ab.multipliers(), ba.multipliers());
}

#[test]
fn initial_kronecker1_defect_matches_oracle() {
    let d = initial_cluster_diagram(&Quiver::kronecker(1), 2).unwrap();
    let r = d.check_consistency().unwrap();
    assert!(!r.consistent);
    assert_eq!(r.defect_degree, Some(2));
    let (ccw, cw) = common::path_products(1, 2, &[]);
    for (j, e, c) in &r.defect_terms {
        assert_eq!(e.lattice.as_slice(), &[1, 1]);
        let (a, b) = if *j == 0 { (&ccw.f, &cw.f) } else { (&ccw.g, &cw.g) };
        let expected = &a.c[1][1] - &b.c[1][1];
        assert_eq!(c.to_string(), expected.to_string(), "generator {j}");
    }
    assert_eq!(r.defect_terms.len(), 2);
}

#[test]
fn single_wall_is_consistent_and_needs_nothing() {
    let q = Quiver::from_arrows(2, &[(0, 1, 1)], true).unwrap();
    let full = initial_cluster_diagram(&q, 5).unwrap();
    let mut d = Diagram::new(full.context.clone(), 5);
    d.walls.push(full.walls[0].clone());
    for k in 1..=5 {
        assert!(d.truncate(k).check_consistency().unwrap().consistent);
    }
    assert_eq!(d.complete(5).unwrap().walls.len(), 1);
}

#[test]
fn kronecker1_adds_one_wall() {
    let d = completed(1, 6).canonical().unwrap();
    let added: Vec<&Wall> = d.walls.iter().filter(|w| w.tag == WallTag::Added).collect();
    assert_eq!(added.len(), 1);
    assert_eq!(added[0].function, Series::binomial(&d.shape(), 6, Exponent::lattice(&[1, 1])));
    assert_eq!(added[0].support.rays2(), vec![[1, -1]]);
}

#[test]
fn equivalence_examples() {
    let d = completed(2, 5);
    let sh = d.shape();
    let mut split = d.clone();
    let w = split.walls[0].clone();
    let g = Series::from_terms(&sh, 5, [(Exponent::lattice(&[0, 0]), qi(1)), (Exponent::lattice(&[1, 0]), Q::new(1.into(), 3.into()))]);
    let rest = w.function.mul(&g.int_pow(-1).unwrap()).unwrap();
    split.walls[0].function = g;
    split.walls.push(Wall::new(w.support.clone(), w.direction.clone(), rest, w.tag));
    assert!(equivalent(&d, &split).unwrap().equivalent);

    let mut extra = d.clone();
    extra.walls.push(Wall::new(Cone::ray([3, 1]), vec![1, 2], Series::one(&sh, 5), WallTag::Added));
    assert!(equivalent(&d, &extra).unwrap().equivalent);

    let r = equivalent(&completed(1, 5), &d).unwrap();
    assert!(!r.equivalent);
    assert!(r.mismatch.is_some());
}

// quiver_dt

#[test]
fn initial_cluster_walls() {
    let d = initial_cluster_diagram(&Quiver::kronecker(4), 3).unwrap();
    assert_eq!(d.walls.len(), 2);
    for (k, w) in d.walls.iter().enumerate() {
        let mut s = vec![0, 0];
        s[k] = 1;
        assert_eq!(w.support, Cone::hyperplane(&s));
        assert_eq!(w.function, Series::binomial(&d.shape(), 3, Exponent::lattice(&s)));
    }
    let d = initial_cluster_diagram(&local_p2_quiver(), 3).unwrap();
    assert_eq!(d.walls.iter().map(|w| w.label).collect::<Vec<_>>(), vec![Some(0), Some(1), Some(2)]);
    let isolated = Quiver::from_arrows(3, &[(0, 1, 2)], true).unwrap();
    assert_eq!(initial_cluster_diagram(&isolated, 3).unwrap().walls.len(), 2);
}

#[test]
fn untrusted_attractor_quotes_condition() {
    let q = Quiver::from_arrows(2, &[(0, 1, 1)], false).unwrap();
    match initial_cluster_diagram(&q, 2) {
        Err(Error::Hypothesis(msg)) => assert!(msg.contains("attractor invariants not asserted trivial")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn simple_roots_have_unit_invariant() {
    for m in 1..=3 {
        let e = DtEngine::new(Quiver::kronecker(m)).unwrap();
        for (g, theta) in [([1, 0], [0, 1]), ([1, 0], [0, -1]), ([0, 1], [1, 0]), ([0, 1], [-1, 0])] {
            let r = e.dt_invariants(&DimensionVector::new(&g), &Covector::from_ints(&theta), 6).unwrap();
            assert_eq!(r.omega, qi(1));
            for k in 2..=6 {
                let gk = [g[0] * k, g[1] * k];
                let r = e.dt_invariants(&DimensionVector::new(&gk), &Covector::from_ints(&theta), 6).unwrap();
                assert_eq!(r.omega, qi(0), "m = {m}, γ = {gk:?}");
            }
        }
    }
}

#[test]
fn kronecker1_diagonal_by_chamber() {
    let e = DtEngine::new(Quiver::kronecker(1)).unwrap();
    let g = DimensionVector::new(&[1, 1]);
    let anti = e.dt_invariants(&g, &Covector::from_ints(&[1, -1]), 6).unwrap();
    assert_eq!((anti.omega.clone(), anti.chamber_note), (qi(1), ChamberNote::AntiAttractor));
    let attr = e.dt_invariants(&g, &Covector::from_ints(&[-1, 1]), 6).unwrap();
    assert_eq!((attr.omega.clone(), attr.chamber_note), (qi(0), ChamberNote::Attractor));
}

#[test]
fn positivity_audits() {
    let e2 = DtEngine::new(Quiver::kronecker(2)).unwrap();
    assert!(positivity_audit(&e2, 7, 2, 1).unwrap().passed());
    let e3 = DtEngine::new(Quiver::kronecker(3)).unwrap();
    assert!(positivity_audit(&e3, 6, 2, 1).unwrap().passed());
    let e1 = DtEngine::new(Quiver::kronecker(1)).unwrap();
    assert!(positivity_audit(&e1, 1, 2, 1).unwrap().passed());
}

#[test]
fn kronecker2_degree_eight_has_half_integer_at_four_four() {
    let e2 = DtEngine::new(Quiver::kronecker(2)).unwrap();
    let r = positivity_audit(&e2, 8, 2, 1).unwrap();
    assert!(!r.violations.is_empty());
    assert!(r.violations.iter().all(|v| v.gamma.0 == vec![4, 4] && v.omega == Q::new(1.into(), 2.into())));
}

// hdtv

#[test]
fn initial_hdtv_rays() {
    let p = correspondence::local_p2().unwrap();
    let d = initial_hdtv_diagram(&p.seed, 3).unwrap();
    let sh = d.shape();
    assert_eq!(d.walls.len(), 3);
    for (i, w) in d.walls.iter().enumerate() {
        let v = p.seed.v(i);
        let e = p.seed.e_vectors[i].clone();
        assert_eq!(linalg_dot(&v, &e), 0);
        assert_eq!(w.support.rays2(), vec![[v[0], v[1]]]);
        let mut t = vec![0; 3];
        t[i] = 1;
        assert_eq!(w.function, Series::binomial(&sh, 3, seed_exp(&v, &t)));
    }
    let c = correspondence::cubic().unwrap();
    let d = initial_hdtv_diagram(&c.seed, 3).unwrap();
    assert_eq!(d.walls.len(), 6);
    let mut rays: Vec<[i64; 2]> = d.walls.iter().flat_map(|w| w.support.rays2()).collect();
    rays.sort();
    rays.dedup();
    assert_eq!(rays.len(), 3);
}

fn linalg_dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn empty_seed_gives_empty_diagram() {
    let s = SymplecticSeed::planar(vec![]);
    assert!(initial_hdtv_diagram(&s, 3).unwrap().walls.is_empty());
}

#[test]
fn incoming_and_outgoing_split() {
    let p = correspondence::local_p2().unwrap();
    let d = hdtv_diagram(&p.seed, 4).unwrap();
    let sh = d.shape();
    for i in 0..3 {
        let v = p.seed.v(i);
        let mut t = vec![0; 3];
        t[i] = 1;
        let (fin, _) = split_in_out(&d, &v).unwrap();
        assert_eq!(fin, Series::binomial(&sh, 4, seed_exp(&v, &t)));
    }
    let k1 = correspondence::kronecker(1).unwrap();
    let d = hdtv_diagram(&k1.seed, 6).unwrap();
    let (fin, fout) = split_in_out(&d, &[1, 1]).unwrap();
    assert!(fin.is_one() && fout.is_one());
    let (fin, fout) = split_in_out(&d, &[1, -1]).unwrap();
    assert!(fin.is_one());
    assert_eq!(fout, Series::binomial(&d.shape(), 6, seed_exp(&[-1, 1], &[1, 1])));
}

#[test]
fn curve_classes() {
    let p = correspondence::local_p2().unwrap();
    for i in 0..3 {
        for l in 1..=3 {
            let mut a = vec![0; 3];
            a[i] = l;
            let v = p.seed.v(i);
            let r = curve_class(&p.seed, &a, &v).unwrap();
            assert_eq!(r.exceptional_multiplicities, a);
            assert_eq!(r.sigma, vec![([v[0], v[1]], -l)]);
            assert_eq!(r.rational_equivalence_sum(), [0, 0]);
        }
    }
    let (v1, v2) = (p.seed.v(0), p.seed.v(1));
    let x = [-(v1[0] + v2[0]), -(v1[1] + v2[1])];
    let r = curve_class(&p.seed, &[1, 1, 0], &x).unwrap();
    assert_eq!(r.rational_equivalence_sum(), [0, 0]);

    let c = correspondence::cubic().unwrap();
    let (v1, v3) = (c.seed.v(0), c.seed.v(2));
    let x = [-(v1[0] + v3[0]), -(v1[1] + v3[1])];
    let r = curve_class(&c.seed, &[1, 0, 1, 0, 0, 0], &x).unwrap();
    assert_eq!(r.exceptional_multiplicities, vec![1, 0, 1, 0, 0, 0]);
    assert_eq!(r.rational_equivalence_sum(), [0, 0]);
}

#[test]
fn gw_vanishes_off_the_walls() {
    let p = correspondence::kronecker(2).unwrap();
    let d = hdtv_diagram(&p.seed, 4).unwrap();
    assert_eq!(gw_combination(&p.seed, &d, &[1, 1], &[1, 5]).unwrap(), qi(0));
    let lp = correspondence::local_p2().unwrap();
    let d = hdtv_diagram(&lp.seed, 4).unwrap();
    let x: Vec<i64> = lp.image_point(&[1, 1, 0]);
    assert_eq!(gw_combination(&lp.seed, &d, &[1, 1, 0], &x).unwrap(), qi(0));
}

#[test]
fn gw_rejects_simple_multiples() {
    let p = correspondence::kronecker(2).unwrap();
    let d = hdtv_diagram(&p.seed, 4).unwrap();
    match gw_combination(&p.seed, &d, &[2, 0], &[1, 1]) {
        Err(Error::Hypothesis(msg)) => assert!(msg.contains("γ ∉ ℤ_{≥1}s_i")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn kronecker2_diagonal_class_carries_pullback_factor() {
    let p = correspondence::kronecker(2).unwrap();
    let d = hdtv_diagram(&p.seed, 6).unwrap();
    let x: Vec<i64> = p.image_point(&[1, 1]).iter().map(|a| -a).collect();
    let gw = gw_combination(&p.seed, &d, &[1, 1], &x).unwrap();
    let theta = p.psi.dual(&Covector::from_ints(&x));
    let rec = DtEngine::new(p.quiver.clone()).unwrap().dt_invariants(&DimensionVector::new(&[1, 1]), &theta, 6).unwrap();
    assert_eq!(p.pullback_factor(&[1, 1]), 2);
    assert_eq!(gw, rec.omega_bar.clone() * qi(2));
    assert_ne!(gw, rec.omega_bar);
}

// correspondence

#[test]
fn pullback_of_simple_wall() {
    let p = correspondence::kronecker(2).unwrap();
    let mut qd = Diagram::new(Context::Quiver { skew: p.quiver.skew_matrix() }, 4);
    let sh = qd.shape();
    qd.walls.push(Wall::new(Cone::hyperplane(&[1, 0]), vec![1, 0], Series::binomial(&sh, 4, Exponent::lattice(&[1, 0])), WallTag::Initial));
    let s = pullback(&qd, &p).unwrap();
    let v1 = p.seed.v(0);
    assert_eq!(v1, vec![-1, 1]);
    assert_eq!(s.walls.len(), 1);
    assert_eq!(s.walls[0].function, Series::binomial(&s.shape(), 4, seed_exp(&v1, &[1, 0])));
    let empty = Diagram::new(qd.context.clone(), 4);
    assert!(pullback(&empty, &p).unwrap().walls.is_empty());
}

#[test]
fn pullback_preserves_consistency() {
    let p = correspondence::kronecker(3).unwrap();
    let qd = completed(3, 5).remove_central_walls().unwrap();
    assert!(pullback(&qd, &p).unwrap().check_consistency().unwrap().consistent);
}

#[test]
fn comparison_small_orders() {
    for name in ["kronecker1", "kronecker2"] {
        let p = correspondence::preset(name).unwrap();
        for order in [1, 4] {
            assert!(verify_comparison(&p, order).unwrap().passed(), "{name} at order {order}");
        }
    }
}

#[test]
fn main_identity_on_one_two() {
    let p = correspondence::kronecker(2).unwrap();
    let r = verify_main(&p, &[vec![1, 2]], 6).unwrap();
    assert_eq!(r.entries.len(), 2);
    assert!(r.passed());
    let attr = r.entries.iter().find(|e| e.chamber == ChamberNote::Attractor).unwrap();
    assert_eq!((attr.quiver_value.clone(), attr.gw_value.clone()), (qi(0), qi(0)));
}

#[test]
fn chern_classes_of_spherical_objects() {
    assert_eq!(gamma_of_chern(-1, 0, -1), ([1, 0, 0], true));
    assert_eq!(gamma_of_chern(2, -1, 0), ([0, 1, 0], true));
    assert_eq!(gamma_of_chern(-1, 1, 0), ([0, 0, 1], true));
}

#[test]
fn local_p2_sheaf_invariants() {
    let route = SeedRoute::new(&correspondence::local_p2().unwrap(), 3).unwrap();
    assert_eq!(local_p2_sheaf_dt(&route, 2, -1, 0).unwrap().omega, qi(1));
    for chi in [-1, 0, 1] {
        match local_p2_sheaf_dt(&route, 1, -1, chi) {
            Err(Error::Hypothesis(msg)) => assert!(msg.contains("with μ:=d/r satisfying −1<μ≤0")),
            other => panic!("{other:?}"),
        }
    }
    assert!(matches!(local_p2_sheaf_dt(&route, 3, -2, 0), Err(Error::Domain(_))));
}

#[test]
fn local_p2_three_minus_two_agrees_with_kronecker3() {
    let route = SeedRoute::new(&correspondence::local_p2().unwrap(), 3).unwrap();
    let seed_side = local_p2_sheaf_dt(&route, 3, -2, -1).unwrap();
    assert_eq!(seed_side.gamma.0, vec![1, 2, 0]);
    // vertices 1, 2 span a 3-Kronecker subquiver; anti-attractor θ of (1,2) there is (2,-1)
    let quiver_side = DtEngine::new(Quiver::kronecker(3))
        .unwrap()
        .dt_invariants(&DimensionVector::new(&[1, 2]), &Covector::from_ints(&[2, -1]), 3)
        .unwrap();
    assert_eq!(seed_side.omega, quiver_side.omega);
    assert_eq!(seed_side.omega, qi(3));
}

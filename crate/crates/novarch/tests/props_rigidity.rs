use novarch::linalg::NovMatrix;
use novarch::novikov::{NovikovElement, Valuation};
use novarch::rational::Rat;
use novarch::rigidity::{
    invert, rectify_map, rectify_map_in_order, rectify_natural_transformation, rigidity_iso_annulus, rigidity_iso_polyannulus,
    rigidity_iso_tate, twist_by, AffElement, AffinoidModel, AlmostNatural, AnnulusFactor, DiagramArrow, ProductPerturbation,
    RigidityIso, SolverTrace, StarProduct,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const E: i64 = 8;

fn e() -> Valuation {
    Valuation::Finite(Rat::int(E))
}

fn random_unit_norm(rng: &mut ChaCha8Rng, model: &AffinoidModel) -> AffElement {
    let basis = model.basis();
    let mut u = model.basis_element(basis[rng.gen_range(0..basis.len())].clone());
    for m in basis {
        if rng.gen_bool(0.3) {
            let c = Rat::int(rng.gen_range(-2..=2));
            u = u.add(&model.basis_element(m).scale(&NovikovElement::constant(c)));
        }
    }
    model.normalize(&u)
}

/// Ordered basis pairs on which `φ(e_a e_b) ≠ φ(e_a) * φ(e_b)` mod `T^E`.
fn broken_pairs(iso: &RigidityIso, star: &dyn StarProduct, work: &AffinoidModel) -> usize {
    let model = &iso.model;
    let mut broken = 0;
    for a in model.basis() {
        for b in model.basis() {
            let ab = model.mul(&model.basis_element(a.clone()), &model.basis_element(b.clone()));
            let mut lhs = Some(AffElement::default());
            for (m, c) in &ab.terms {
                lhs = lhs.and_then(|acc| iso.image(m).map(|img| acc.add(&img.scale(c))));
            }
            let ok = match (lhs, iso.image(&a), iso.image(&b)) {
                (Some(lhs), Some(x), Some(y)) => model.eq_mod(&lhs, &star.product(work, x, y), &model.precision),
                _ => false,
            };
            if !ok {
                broken += 1;
            }
        }
    }
    broken
}

/// Every basis image is `e + (terms of positive valuation)`, so `φ` is an
/// isometry of the orthonormal basis.
fn basis_isometric(iso: &RigidityIso) -> bool {
    let model = &iso.model;
    model.basis().into_iter().all(|m| match iso.image(&m) {
        Some(img) => img.sub(&model.basis_element(m.clone())).terms.iter().all(|(k, c)| {
            !model.in_basis(k) || c.truncate(&Valuation::Finite(model.precision.clone())).val() > Valuation::Finite(Rat::ZERO)
        }),
        None => false,
    })
}

fn contracts(trace: &SolverTrace) -> bool {
    trace.defects.windows(2).all(|w| match (&w[0], &w[1]) {
        (Valuation::Finite(a), Valuation::Finite(b)) => &(b - a) >= &trace.predicted_gain && b > a,
        (_, Valuation::Infinite) => true,
        (Valuation::Infinite, Valuation::Finite(_)) => false,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tate_isomorphisms(seed in any::<u64>(), vars in 1usize..=2, n in 1usize..=4, extra in 1i64..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = AffinoidModel::tate(vars, n, Rat::int(E));
        let u = random_unit_norm(&mut rng, &model);
        let gamma = Rat::new(1, 2);
        let lambda = &gamma + &Rat::new(extra, 4);
        let pert = ProductPerturbation::new(&model, Box::new(twist_by(&model, &lambda, &u)), gamma.clone()).unwrap();
        let iso = rigidity_iso_tate(&model, &pert).unwrap();
        prop_assert_eq!(broken_pairs(&iso, pert.star.as_ref(), &model), 0);
        prop_assert!(basis_isometric(&iso));
        prop_assert!(contracts(&iso.unit_trace));
        prop_assert!(iso.report.distance > Valuation::Finite(gamma));
        prop_assert!(iso.holds());
    }

    #[test]
    fn annulus_isomorphisms(seed in any::<u64>(), n in 1usize..=3, r1 in 1i64..=4, r2 in 1i64..=4, extra in 1i64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let factor = AnnulusFactor { r1: Rat::new(r1, 4), r2: Rat::new(r2, 4) };
        let s = factor.width();
        let model = AffinoidModel::polyannulus(vec![factor], n, Rat::int(E)).unwrap();
        let u = random_unit_norm(&mut rng, &model);
        let gamma = &s + &Rat::new(1, 4);
        let lambda = &gamma + &Rat::new(extra, 4);
        let pert = ProductPerturbation::new(&model, Box::new(twist_by(&model, &lambda, &u)), gamma.clone()).unwrap();
        let iso = rigidity_iso_annulus(&model, &pert).unwrap();
        let work = model.with_precision(&model.precision + &s);
        prop_assert_eq!(broken_pairs(&iso, pert.star.as_ref(), &work), 0);
        prop_assert!(basis_isometric(&iso));
        prop_assert!(contracts(&iso.unit_trace) && contracts(&iso.annuli[0].trace));
        prop_assert!(iso.report.distance > Valuation::Finite(&gamma - &s));
        prop_assert!(iso.holds());

        // One factor through the polyannulus route gives the same map.
        let poly = rigidity_iso_polyannulus(&model, &pert).unwrap();
        for m in model.basis() {
            prop_assert!(model.eq_mod(&poly.images[&m], &iso.images[&m], &model.precision));
        }
    }
}

#[test]
fn two_factor_polyannulus_with_mixed_radii() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let factors = vec![AnnulusFactor { r1: Rat::new(1, 4), r2: Rat::new(1, 2) }, AnnulusFactor { r1: Rat::ONE, r2: Rat::new(1, 4) }];
    let model = AffinoidModel::polyannulus(factors, 2, Rat::int(6)).unwrap();
    let s_max = Rat::new(5, 4);
    let u = random_unit_norm(&mut rng, &model);
    let gamma = Rat::new(3, 2);
    let pert = ProductPerturbation::new(&model, Box::new(twist_by(&model, &Rat::new(7, 4), &u)), gamma.clone()).unwrap();
    let iso = rigidity_iso_polyannulus(&model, &pert).unwrap();
    let work = model.with_precision(&model.precision + &s_max);
    assert_eq!(broken_pairs(&iso, pert.star.as_ref(), &work), 0);
    assert!(basis_isometric(&iso));
    assert!(iso.annuli.iter().all(|a| contracts(&a.trace)));
    assert!(iso.holds(), "{:?}", iso.report);
    assert!(iso.report.distance > Valuation::Finite(&gamma - &s_max));
}

#[test]
fn closeness_at_the_annulus_width_is_rejected() {
    let model = AffinoidModel::polyannulus(vec![AnnulusFactor { r1: Rat::ONE, r2: Rat::ONE }], 2, Rat::int(6)).unwrap();
    let u = model.annulus_var(0, 1);
    let pert = ProductPerturbation::new(&model, Box::new(twist_by(&model, &Rat::new(9, 4), &u)), Rat::int(2)).unwrap();
    assert!(rigidity_iso_annulus(&model, &pert).is_err());
}

// Rectification. Structure maps are unipotent with entries in the valuation
// ring, so inverting them loses no precision and composites are exact mod
// T^E.

fn q(v: i64) -> Rat {
    Rat::new(v, 4)
}

fn unipotent(rng: &mut ChaCha8Rng, n: usize, lower: bool) -> NovMatrix {
    let mut m = NovMatrix::identity(n, e());
    for i in 0..n {
        for j in 0..n {
            if (lower && j < i) || (!lower && j > i) {
                if rng.gen_bool(0.7) {
                    let c = Rat::int(rng.gen_range(-2..=2));
                    m.set(i, j, NovikovElement::from_terms([(q(rng.gen_range(0..=4)), c)], e()));
                }
            }
        }
    }
    m
}

fn permutation(rng: &mut ChaCha8Rng, n: usize) -> NovMatrix {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut p = NovMatrix::zeros(n, n, e());
    for (i, &j) in order.iter().enumerate() {
        p.set(i, j, NovikovElement::one());
    }
    p
}

fn isometry(rng: &mut ChaCha8Rng, n: usize) -> NovMatrix {
    permutation(rng, n).mul(&unipotent(rng, n, false))
}

fn structure_map(rng: &mut ChaCha8Rng, n: usize) -> NovMatrix {
    unipotent(rng, n, true).mul(&unipotent(rng, n, false))
}

/// `g + T^λ X` with `X` random with entries in the valuation ring.
fn perturbed(rng: &mut ChaCha8Rng, g: &NovMatrix, lambda: &Rat) -> NovMatrix {
    let mut out = g.clone();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            if rng.gen_bool(0.5) {
                let c = Rat::int(rng.gen_range(1..=3));
                let x = g.get(i, j) + &NovikovElement::from_terms([(lambda + &q(rng.gen_range(0..=4)), c)], e());
                out.set(i, j, x.truncate(&e()));
            }
        }
    }
    out
}

/// `h₁ = g h₀ f⁻¹`, closing the square exactly.
fn closing(f: &NovMatrix, g: &NovMatrix, h0: &NovMatrix) -> NovMatrix {
    g.mul(h0).mul(&invert(f).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rectifying_a_commuting_square_is_idempotent(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h0) = (isometry(&mut rng, n), isometry(&mut rng, n), structure_map(&mut rng, n));
        let h1 = closing(&f, &g, &h0);
        let r = rectify_map(&f, &g, &h0, &h1).unwrap();
        prop_assert!(r.map.eq_mod(&g));
        prop_assert!(r.commutes);
        prop_assert_eq!(r.distance, Valuation::Infinite);
        let again = rectify_map(&f, &r.map, &h0, &h1).unwrap();
        prop_assert!(again.map.eq_mod(&r.map));
    }

    #[test]
    fn spanning_orders_give_the_same_map(seed in any::<u64>(), n in 2usize..=4, lambda in 1i64..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h0) = (isometry(&mut rng, n), isometry(&mut rng, n), structure_map(&mut rng, n));
        let h1 = closing(&f, &g, &h0);
        let g_near = perturbed(&mut rng, &g, &q(lambda));
        let forward = rectify_map(&f, &g_near, &h0, &h1).unwrap();
        let order: Vec<usize> = (0..n).rev().collect();
        let backward = rectify_map_in_order(&f, &g_near, &h0, &h1, &order).unwrap();
        prop_assert!(forward.map.eq_mod(&backward.map));
        prop_assert!(forward.map.eq_mod(&g));
        prop_assert!(forward.commutes && backward.commutes);
        prop_assert!(forward.distance >= Valuation::Finite(q(lambda)));
    }
}

struct Diagram {
    source: Vec<(usize, usize, NovMatrix)>,
    maps: Vec<NovMatrix>,
}

impl Diagram {
    /// Closes every square exactly: target arrow `f_j a f_i⁻¹`.
    fn commuting(&self) -> Vec<DiagramArrow> {
        self.source
            .iter()
            .map(|(i, j, a)| DiagramArrow { from: *i, to: *j, source: a.clone(), target: closing(&self.maps[*i], &self.maps[*j], a) })
            .collect()
    }
}

#[test]
fn chain_rectifies_through_composites() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 3;
    let maps: Vec<NovMatrix> = (0..3).map(|_| isometry(&mut rng, n)).collect();
    let source = vec![(0, 1, structure_map(&mut rng, n)), (1, 2, structure_map(&mut rng, n))];
    let d = Diagram { source, maps: maps.clone() };
    let arrows = d.commuting();
    let near: Vec<NovMatrix> = maps.iter().enumerate().map(|(i, f)| if i == 0 { f.clone() } else { perturbed(&mut rng, f, &Rat::ONE) }).collect();
    let r = rectify_natural_transformation(&AlmostNatural { arrows: arrows.clone(), maps: near.clone() }).unwrap();
    assert_eq!(r.initial, 0);
    assert!(r.natural && r.small);
    for i in 0..3 {
        assert!(r.maps[i].eq_mod(&maps[i]), "object {i}");
    }
    let h = arrows[1].source.mul(&arrows[0].source);
    let k = arrows[1].target.mul(&arrows[0].target);
    let direct = rectify_map(&near[0], &near[2], &h, &k).unwrap();
    assert!(direct.map.eq_mod(&r.maps[2]));
}

#[test]
fn diamond_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 3;
    let maps: Vec<NovMatrix> = (0..4).map(|_| isometry(&mut rng, n)).collect();
    let (a01, a02, a13) = (structure_map(&mut rng, n), structure_map(&mut rng, n), structure_map(&mut rng, n));
    let a23 = a13.mul(&a01).mul(&invert(&a02).unwrap());
    let d = Diagram { source: vec![(0, 1, a01), (0, 2, a02), (1, 3, a13), (2, 3, a23)], maps: maps.clone() };
    let arrows = d.commuting();
    let near: Vec<NovMatrix> = maps.iter().enumerate().map(|(i, f)| if i == 0 { f.clone() } else { perturbed(&mut rng, f, &Rat::new(3, 4)) }).collect();
    let r = rectify_natural_transformation(&AlmostNatural { arrows: arrows.clone(), maps: near.clone() }).unwrap();
    assert!(r.natural && r.small);
    let via = |x: usize, y: usize| {
        let h = arrows[y].source.mul(&arrows[x].source);
        let k = arrows[y].target.mul(&arrows[x].target);
        rectify_map(&near[0], &near[3], &h, &k).unwrap().map
    };
    let (through_1, through_2) = (via(0, 2), via(1, 3));
    assert!(through_1.eq_mod(&through_2));
    assert!(through_1.eq_mod(&r.maps[3]));
    assert!(r.maps[3].eq_mod(&maps[3]));
}

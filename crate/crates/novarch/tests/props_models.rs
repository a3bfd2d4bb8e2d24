use std::collections::BTreeMap;
use std::sync::OnceLock;

use novarch::complexes::{homology_barcode, Weighting};
use novarch::error::Error;
use novarch::hpt::homology_class_val;
use novarch::linalg::default_slack;
use novarch::models::{cp1_model, polyannulus_bv, solve_exact_logform, LogForm, PolyMonomial, Polyvector, PolyvectorBV};
use novarch::novikov::NovikovElement;
use novarch::rational::Rat;
use novarch::rigidity::AnnulusFactor;
use proptest::prelude::*;

fn coefficient() -> impl Strategy<Value = NovikovElement> {
    ((-3i64..=3).prop_filter("nonzero", |c| *c != 0), 0i64..=8)
        .prop_map(|(c, k)| NovikovElement::t_pow(Rat::new(k, 4)).scale(&Rat::int(c)))
}

fn exponent(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-2i64..=2, n)
}

fn poly_monomial(n: usize) -> impl Strategy<Value = PolyMonomial> {
    (exponent(n), 0u32..(1 << n)).prop_map(|(exponent, thetas)| PolyMonomial { exponent, thetas })
}

fn polyvector(n: usize) -> impl Strategy<Value = Polyvector> {
    prop::collection::vec((poly_monomial(n), coefficient()), 1..=4).prop_map(|terms| {
        terms.into_iter().fold(Polyvector::default(), |acc, (m, c)| acc.add(&Polyvector::monomial(m.exponent, m.thetas, c)))
    })
}

fn radii(n: usize) -> impl Strategy<Value = Vec<AnnulusFactor>> {
    prop::collection::vec((1i64..=4, 1i64..=4), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| AnnulusFactor { r1: Rat::new(a, 4), r2: Rat::new(b, 4) }).collect())
}

/// Unit-radius models for `n = 1, 2, 3`, built once: construction runs its
/// own sampled checks.
fn unit_bv(n: usize) -> &'static PolyvectorBV {
    static MODELS: OnceLock<Vec<PolyvectorBV>> = OnceLock::new();
    let models = MODELS.get_or_init(|| {
        (1..=3).map(|n| polyannulus_bv(n, vec![AnnulusFactor { r1: Rat::ONE, r2: Rat::new(1, 2) }; n], 2).unwrap()).collect()
    });
    &models[n - 1]
}

fn sign(p: i64) -> Rat {
    if p.rem_euclid(2) == 0 {
        Rat::ONE
    } else {
        -Rat::ONE
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn models_accept_arbitrary_radii(rs in (1usize..=3).prop_flat_map(radii)) {
        let n = rs.len();
        let bv = polyannulus_bv(n, rs, 2).unwrap();
        prop_assert!(bv.checks.all(), "{:?}", bv.checks);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cp1_homology_is_stable_in_the_truncation(k in 1i64..=19, n in 6usize..=9) {
        prop_assume!(k != 10);
        let r = Rat::new(k, 20);
        let large = k > 10;
        let slack = default_slack();
        for trunc in [n, n + 2] {
            let m = cp1_model(&r, trunc, &Rat::int(20)).unwrap();
            let c = &m.complex.complex;
            let bars = homology_barcode(c, Weighting::Norm, &slack).unwrap();
            let expected = if large { 2 } else { 0 };
            prop_assert_eq!(bars.total_free_rank(), expected, "r = {}, N = {}", r, trunc);
            prop_assert_eq!(bars.free_rank(0), expected);
            for i in 0..2 {
                prop_assert_eq!(homology_class_val(c, &m.even_generator(i)).is_infinite(), !large);
            }
        }
    }

    #[test]
    fn delta_squares_to_zero((n, x) in (1usize..=3).prop_flat_map(|n| (Just(n), polyvector(n)))) {
        let bv = unit_bv(n);
        prop_assert!(bv.delta(&bv.delta(&x)).is_zero());
    }

    #[test]
    fn bracket_identities(
        (n, x, y, z) in (1usize..=3).prop_flat_map(|n| (Just(n), poly_monomial(n), poly_monomial(n), poly_monomial(n))),
    ) {
        let bv = unit_bv(n);
        prop_assert!(bv.jacobi_holds(&x, &y, &z));
        prop_assert!(bv.leibniz_holds(&x, &y, &z));
        let (ex, ey) = (bv.element(&x), bv.element(&y));
        let s = sign((x.degree() as i64 - 1) * (y.degree() as i64 - 1) + 1);
        prop_assert_eq!(bv.bracket(&ex, &ey), bv.bracket(&ey, &ex).scale_rat(&s));
    }

    #[test]
    fn theta_acts_as_the_lie_derivative((n, m, i) in (1usize..=3).prop_flat_map(|n| (Just(n), poly_monomial(n), 0..n))) {
        let bv = unit_bv(n);
        // θ_i = z_i ∂/∂z_i scales z^a by a_i and commutes with every θ_j.
        let got = bv.bracket(&bv.theta(i), &bv.element(&m));
        let want = bv.element(&m).scale_rat(&Rat::int(m.exponent[i]));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn logform_round_trip(
        (n, h, rho) in (1usize..=3).prop_flat_map(|n| (
            Just(n),
            prop::collection::btree_map(exponent(n).prop_filter("nonconstant", |a| a.iter().any(|&k| k != 0)), coefficient(), 0..=5),
            prop::collection::vec(prop::option::of(coefficient()), n),
        )),
    ) {
        let mut alpha = LogForm::exterior_derivative(n, &h);
        let mut residues = vec![NovikovElement::zero(); n];
        for (i, c) in rho.iter().enumerate() {
            if let Some(c) = c {
                alpha.add_term(vec![0; n], i, c.clone());
                residues[i] = c.clone();
            }
        }
        let sol = solve_exact_logform(&alpha).unwrap();
        prop_assert_eq!(&sol.obstruction, &residues);
        prop_assert_eq!(&sol.h, &h);
        let dh = LogForm::exterior_derivative(n, &sol.h);
        prop_assert!(dh.sub(&alpha.sub(&sol.obstruction_form(n))).is_zero());
    }

    #[test]
    fn non_closed_forms_are_rejected(a in exponent(2), c in coefficient()) {
        prop_assume!(a[0] != 0);
        // A dlog z₂ component on z^a with a₁ ≠ 0 and no matching dlog z₁ part.
        let mut alpha = LogForm::new(2);
        alpha.add_term(a.clone(), 1, c);
        let closed = alpha.closedness_violation().is_none();
        prop_assert!(!closed);
        let rejected = matches!(solve_exact_logform(&alpha), Err(Error::NotClosed { i: 0, j: 1, .. }));
        prop_assert!(rejected);
    }
}

#[test]
fn lie_derivative_on_every_monomial() {
    for n in 1..=3 {
        let bv = polyannulus_bv(n, vec![AnnulusFactor { r1: Rat::ONE, r2: Rat::ONE }; n], 2).unwrap();
        for m in bv.monomials() {
            for i in 0..n {
                let got = bv.bracket(&bv.theta(i), &bv.element(&m));
                assert_eq!(got, bv.element(&m).scale_rat(&Rat::int(m.exponent[i])), "n = {n}, θ_{i}, {m:?}");
            }
        }
    }
}

#[test]
fn logform_with_only_residues_has_no_primitive() {
    let mut alpha = LogForm::new(3);
    alpha.add_term(vec![0, 0, 0], 2, NovikovElement::t_pow(Rat::new(1, 2)));
    let sol = solve_exact_logform(&alpha).unwrap();
    assert_eq!(sol.h, BTreeMap::new());
    assert!(!sol.is_exact());
}

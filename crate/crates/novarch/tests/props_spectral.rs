mod common;

use proptest::prelude::*;

use common::*;
use novarch::complexes::{associated_graded, FloerTypeComplex, Grading};
use novarch::error::Error;
use novarch::hpt::{perturb, special_dr};
use novarch::linalg::{operator_norm_val, NovMatrix, ValuedBasis};
use novarch::models::random_deformable_complex;
use novarch::novikov::{NovikovElement, Valuation};
use novarch::rational::Rat;
use novarch::spectral::{compute_pages, tau_from_ss, SpectralSequenceState};
use novarch::tauflux::check_monotonicity;

fn horizon(c: &FloerTypeComplex) -> usize {
    usize::try_from((&(c.precision() - &Rat::ONE) / &c.hbar).floor()).unwrap()
}

fn pages(c: &FloerTypeComplex) -> SpectralSequenceState {
    compute_pages(c, horizon(c)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pages_are_consistent_and_tau_is_the_deformed_differential(seed in 0u64..100_000, rank in 2usize..=8, b in 0i64..=3) {
        let v = random_deformable_complex(seed, rank, &q(1, 2), &q(b, 4));
        let st = pages(&v);
        prop_assert!(st.pages_consistent() && st.e1_matches_reduction);
        let g = associated_graded(&v);
        let sdr = special_dr(&g.complex, &q(1, 100)).unwrap();
        let pr = perturb(&g.complex, &sdr, &v.perturbation(), None).unwrap();
        let zero = vec![Rat::ZERO; pr.homology.len()];
        let tau = tau_from_ss(&st).unwrap();
        prop_assert_eq!(&tau, &operator_norm_val(&pr.deformed_differential, &zero, &zero));
        prop_assert_eq!(st.collapse_certified, pr.deformed_differential.is_zero());
        prop_assert_eq!(st.collapse_certified, tau.is_infinite());
    }

    #[test]
    fn tau_survives_filtered_basis_changes(seed in 0u64..100_000, rank in 2usize..=8, change in 0u64..1000) {
        let v = random_deformable_complex(seed, rank, &q(1, 2), &q(1, 4));
        let changed = isometric_change(&v.complex, change, &v.hbar, |_, _| true);
        let w = FloerTypeComplex::new(changed, v.hbar.clone(), v.outside.clone()).unwrap();
        let (a, b) = (pages(&v), pages(&w));
        prop_assert_eq!(tau_from_ss(&a).unwrap(), tau_from_ss(&b).unwrap());
        prop_assert_eq!(a.first_nonzero_page, b.first_nonzero_page);
        let ranks = |s: &SpectralSequenceState| s.pages.iter().map(|p| p.ranks()).collect::<Vec<_>>();
        prop_assert_eq!(ranks(&a), ranks(&b));
    }

    #[test]
    fn tau_does_not_depend_on_hbar(seed in 0u64..100_000, rank in 2usize..=8) {
        let v = random_deformable_complex(seed, rank, &q(1, 2), &q(1, 4));
        let finer = FloerTypeComplex::new(v.complex.clone(), q(1, 4), v.outside.clone()).unwrap();
        let (a, b) = (pages(&v), pages(&finer));
        prop_assert_eq!(tau_from_ss(&a).unwrap(), tau_from_ss(&b).unwrap());
        if let (Some(i), Some(j)) = (a.first_nonzero_page, b.first_nonzero_page) {
            // The same differential sits on page ⌊τ/ħ⌋ + 1 for each ħ.
            prop_assert!(j >= i);
        }
    }
}

/// `a → T^μ b` and one free class.
fn pair(mu: Rat, hbar: &Rat) -> SpectralSequenceState {
    let basis = ValuedBasis::new(vec!["a".into(), "b".into(), "f".into()], vec![0, 1, 0], vec![Rat::ZERO; 3]);
    let mut d = NovMatrix::zeros(3, 3, Valuation::Finite(Rat::int(10)));
    d.set(1, 0, NovikovElement::t_pow(mu));
    let c = FloerTypeComplex::from_parts(basis, Grading::Z, d, hbar.clone(), Rat::int(10)).unwrap();
    compute_pages(&c, 6).unwrap()
}

#[test]
fn monotonicity_on_hand_built_models() {
    let hbar = q(1, 2);
    let k1 = pair(hbar.clone(), &hbar);
    let k2 = pair(&hbar * &Rat::int(2), &hbar);
    assert_eq!(tau_from_ss(&k1).unwrap(), Valuation::Finite(hbar.clone()));
    assert_eq!(tau_from_ss(&k2).unwrap(), Valuation::Finite(Rat::ONE));
    let id = NovMatrix::identity(3, Valuation::Finite(Rat::int(10)));
    let r = check_monotonicity(&k1, &k2, &id).unwrap();
    assert!(r.holds);
    assert!(!check_monotonicity(&k2, &k1, &id).unwrap().holds);
    let mut collapse = id.clone();
    collapse.set(0, 0, NovikovElement::zero());
    assert!(matches!(check_monotonicity(&k1, &k2, &collapse), Err(Error::MapNotInjective { .. })));
}

#[test]
fn identical_states_are_monotone() {
    let k = pair(q(3, 4), &q(1, 2));
    let id = NovMatrix::identity(3, Valuation::Finite(Rat::int(10)));
    let r = check_monotonicity(&k, &k, &id).unwrap();
    assert!(r.holds && r.tau_small == r.tau_large);
}

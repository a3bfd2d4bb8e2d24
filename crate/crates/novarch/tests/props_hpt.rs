mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::*;
use novarch::complexes::{associated_graded, homology_barcode, FloerTypeComplex, Grading, ValuedComplex, Weighting};
use novarch::hpt::{boundary_depth, check_perturbed, check_sdr, perturb, special_dr};
use novarch::linalg::{default_slack, weighted_val, NovMatrix, NovVector, ValuedBasis};
use novarch::models::{random_deformable_complex, random_floer_complex};
use novarch::novikov::{NovikovElement, Valuation};
use novarch::rational::Rat;

/// Two-degree complex `C⁰ → C¹` with at most two generators in each degree
/// and monomial entries `±T^e`, `e ≥ max(0, w_j − w_i)`.
#[derive(Clone, Debug)]
struct Small {
    w0: Vec<Rat>,
    w1: Vec<Rat>,
    /// `entries[i][j]`: `None` or `(sign, extra exponent)`.
    entries: Vec<Vec<Option<(bool, i64)>>>,
}

fn small() -> impl Strategy<Value = Small> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(a, b)| {
        (
            weights(a),
            weights(b),
            prop::collection::vec(prop::collection::vec(prop::option::weighted(0.7, (any::<bool>(), 0i64..=6)), a), b),
        )
            .prop_map(|(w0, w1, entries)| Small { w0, w1, entries })
    })
}

impl Small {
    fn complex(&self) -> ValuedComplex {
        let (a, b) = (self.w0.len(), self.w1.len());
        let mut names = Vec::new();
        for i in 0..a + b {
            names.push(format!("g{i}"));
        }
        let degrees = (0..a).map(|_| 0).chain((0..b).map(|_| 1)).collect();
        let weights = self.w0.iter().chain(&self.w1).cloned().collect();
        let mut d = NovMatrix::zeros(a + b, a + b, Valuation::Finite(Rat::int(10)));
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Some((neg, k)) = e {
                    d.set(a + i, j, monomial(*neg, &self.exponent(i, j, *k)));
                }
            }
        }
        ValuedComplex::new(ValuedBasis::new(names, degrees, weights), Grading::Z, d, Rat::int(10)).unwrap()
    }

    fn exponent(&self, i: usize, j: usize, k: i64) -> Rat {
        &(&self.w0[j] - &self.w1[i]).max(Rat::ZERO) + &q(k, 4)
    }
}

fn monomial(neg: bool, e: &Rat) -> NovikovElement {
    NovikovElement::monomial(Rat::int(if neg { -1 } else { 1 }), e.clone())
}

/// `sup_t val(y + t k)`: clear `y` at the pivot of `k`, where `k` attains
/// its weighted valuation.
fn class_val(y: &[NovikovElement], kernel: Option<&NovVector>, w: &[Rat]) -> Valuation {
    let Some(k) = kernel else { return weighted_val(y, w) };
    let p = (0..k.len()).filter(|&i| !k[i].is_zero()).min_by_key(|&i| k[i].val().plus(&w[i])).expect("nonzero kernel");
    let t = -&(&y[p] * &k[p].inverse(&Valuation::Infinite).unwrap());
    let shifted: NovVector = y.iter().zip(k).map(|(a, b)| a + &(&t * b)).collect();
    weighted_val(&shifted, w)
}

/// Kernel of a block with at most two columns of monomials.
fn kernel(d: &NovMatrix) -> Option<NovVector> {
    let cols = d.cols();
    let zero_col = (0..cols).find(|&j| (0..d.rows()).all(|i| d.get(i, j).is_zero()));
    if let Some(j) = zero_col {
        let mut k = vec![NovikovElement::zero(); cols];
        k[j] = NovikovElement::one();
        return Some(k);
    }
    if cols == 1 {
        return None;
    }
    let r = (0..d.rows()).find(|&i| !d.get(i, 0).is_zero() && !d.get(i, 1).is_zero());
    let Some(r) = r else { return None };
    let k = vec![d.get(r, 1).clone(), -d.get(r, 0)];
    let image: NovVector = (0..d.rows()).map(|i| &(d.get(i, 0) * &k[0]) + &(d.get(i, 1) * &k[1])).collect();
    image.iter().all(NovikovElement::is_zero).then_some(k)
}

/// `β = sup over y on the grid of val(dy) − val([y] ∈ C⁰/ker d)`, with
/// coefficients `0` or `±T^{k/4}` for `k/4 ∈ [−3, 4]`.
fn exhaustive_depth(s: &Small) -> Rat {
    let c = s.complex();
    let a = s.w0.len();
    let b = s.w1.len();
    let block = c.d.submatrix(&(a..a + b).collect::<Vec<_>>(), &(0..a).collect::<Vec<_>>());
    let k = kernel(&block);
    let mut options = vec![NovikovElement::zero()];
    for e in -12i64..=16 {
        options.push(monomial(false, &q(e, 4)));
        options.push(monomial(true, &q(e, 4)));
    }
    let mut best = Rat::ZERO;
    let mut ys: Vec<NovVector> = vec![Vec::new()];
    for _ in 0..a {
        ys = ys.into_iter().flat_map(|y| options.iter().map(move |o| [y.clone(), vec![o.clone()]].concat())).collect();
    }
    for y in ys {
        let x = block.apply(&y);
        let (Valuation::Finite(vx), Valuation::Finite(vy)) = (weighted_val(&x, &s.w1), class_val(&y, k.as_ref(), &s.w0)) else { continue };
        let gap = &vx - &vy;
        if gap > best {
            best = gap;
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn both_routes_match_the_exhaustive_search(s in small()) {
        let r = boundary_depth(&s.complex(), &default_slack()).unwrap();
        prop_assert!(r.methods_agree);
        prop_assert_eq!(r.beta, exhaustive_depth(&s));
    }

    #[test]
    fn depth_is_invariant_under_isometric_changes(seed in 0u64..10_000, rank in 1usize..=8, change in 0u64..1000) {
        let c = random_floer_complex(seed, rank, &q(1, 2), &q((seed % 5) as i64, 4)).complex;
        let changed = isometric_change(&c, change, &Rat::ZERO, |_, _| true);
        let slack = default_slack();
        prop_assert_eq!(boundary_depth(&c, &slack).unwrap().beta, boundary_depth(&changed, &slack).unwrap().beta);
    }

    #[test]
    fn depth_scales_with_the_complex(seed in 0u64..10_000, rank in 1usize..=8, num in 1i64..=9, den in 1i64..=4) {
        let c = random_floer_complex(seed, rank, &q(1, 2), &q((seed % 5) as i64, 4));
        let t = q(num, den);
        let slack = default_slack();
        let b = boundary_depth(&c.complex, &slack).unwrap();
        let bt = boundary_depth(&c.rescale(&t).unwrap().complex, &slack).unwrap();
        prop_assert!(bt.methods_agree);
        prop_assert_eq!(bt.beta, &t * &b.beta);
    }

    #[test]
    fn perturbation_lemma_holds(seed in 0u64..100_000, rank in 2usize..=8, b in 0i64..=3) {
        let hbar = q(1, 2);
        let v = random_deformable_complex(seed, rank, &hbar, &q(b, 4));
        let g = associated_graded(&v);
        let sdr = special_dr(&g.complex, &q(1, 100)).unwrap();
        let sc = check_sdr(&g.complex, &sdr);
        prop_assert!(sc.identities_hold() && sc.norms_bounded(&sdr.beta));
        let pr = perturb(&g.complex, &sdr, &v.perturbation(), None).unwrap();
        let chk = check_perturbed(&v.complex, &pr, &hbar, &default_slack()).unwrap();
        prop_assert!(chk.all(), "{:?}", chk);
    }
}

#[test]
fn lambda_pair_has_depth_lambda() {
    let lambda = q(7, 3);
    let basis = ValuedBasis::new(vec!["y".into(), "x".into()], vec![0, 1], vec![Rat::ZERO, Rat::ZERO]);
    let mut d = NovMatrix::zeros(2, 2, Valuation::Finite(Rat::int(10)));
    d.set(1, 0, NovikovElement::t_pow(lambda.clone()));
    let c = ValuedComplex::new(basis, Grading::Z, d, Rat::int(10)).unwrap();
    let r = boundary_depth(&c, &default_slack()).unwrap();
    assert_eq!((r.beta_torsion, r.beta_definition), (lambda.clone(), lambda));
}

#[test]
fn zero_perturbation_changes_nothing() {
    let v = random_floer_complex(3, 6, &q(1, 2), &q(1, 2));
    let g = associated_graded(&v);
    let sdr = special_dr(&g.complex, &q(1, 100)).unwrap();
    let zero = NovMatrix::zeros(v.len(), v.len(), g.complex.cap());
    let pr = perturb(&g.complex, &sdr, &zero, None).unwrap();
    assert!(pr.deformed_differential.is_zero());
    assert!(pr.include.eq_mod(&sdr.include) && pr.project.eq_mod(&sdr.project) && pr.homotopy.eq_mod(&sdr.homotopy));
}

#[test]
fn zero_differential_retracts_by_the_identity() {
    let basis = ValuedBasis::new(vec!["a".into(), "b".into()], vec![0, 1], vec![Rat::ZERO, q(3, 2)]);
    let d = NovMatrix::zeros(2, 2, Valuation::Finite(Rat::int(10)));
    let c = FloerTypeComplex::from_parts(basis, Grading::Z, d, q(1, 2), Rat::int(10)).unwrap();
    let sdr = special_dr(&c.complex, &q(1, 100)).unwrap();
    let id = NovMatrix::identity(2, c.complex.cap());
    assert!(sdr.include.eq_mod(&id) && sdr.project.eq_mod(&id) && sdr.homotopy.is_zero());
    assert_eq!(sdr.beta, Rat::ZERO);
}

#[test]
fn depth_vanishes_exactly_for_torsion_free_homology() {
    let slack = default_slack();
    let mut seen = BTreeMap::new();
    for seed in 0..80 {
        let c = random_floer_complex(seed, 5, &q(1, 2), &q((seed % 3) as i64, 4)).complex;
        let beta = boundary_depth(&c, &slack).unwrap().beta;
        let torsion_free = homology_barcode(&c, Weighting::Norm, &slack).unwrap().max_torsion().is_none();
        assert_eq!(beta.is_zero(), torsion_free, "seed {seed}");
        *seen.entry(torsion_free).or_insert(0) += 1;
    }
    assert_eq!(seen.len(), 2);
}

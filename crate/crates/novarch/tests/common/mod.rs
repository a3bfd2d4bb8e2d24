#![allow(dead_code)]

use proptest::prelude::*;

use novarch::linalg::NovMatrix;
use novarch::novikov::{NovikovElement, Valuation};
use novarch::rational::Rat;

pub fn q(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// Exponents on the grid `k/4`, `0 ≤ k ≤ 12`.
pub fn exponent() -> impl Strategy<Value = Rat> {
    (0i64..=12).prop_map(|k| q(k, 4))
}

pub fn coefficient() -> impl Strategy<Value = Rat> {
    prop_oneof![(-3i64..=-1), (1i64..=3)].prop_map(Rat::int)
}

/// Exact element of `Λ_{≥0}` with up to three terms.
pub fn element() -> impl Strategy<Value = NovikovElement> {
    prop::collection::vec((exponent(), coefficient()), 0..=3)
        .prop_map(|terms| NovikovElement::from_terms(terms.into_iter(), Valuation::Infinite))
}

pub fn nonzero_element() -> impl Strategy<Value = NovikovElement> {
    element().prop_filter("nonzero", |x| !x.is_zero())
}

/// `rows × cols` over `Λ_{≥0}`, sparse.
pub fn matrix(rows: usize, cols: usize, precision: Rat) -> impl Strategy<Value = NovMatrix> {
    let cell = prop_oneof![2 => Just(NovikovElement::zero()), 3 => element()];
    prop::collection::vec(cell, rows * cols).prop_map(move |cells| {
        let mut m = NovMatrix::zeros(rows, cols, Valuation::Finite(precision.clone()));
        for (k, x) in cells.into_iter().enumerate() {
            m.set(k / cols, k % cols, x);
        }
        m
    })
}

/// Unimodular over `Λ_{≥0}`: a permutation times a unipotent upper
/// triangular matrix with entries in `Λ_{≥0}`.
pub fn unimodular(n: usize, precision: Rat) -> impl Strategy<Value = NovMatrix> {
    (Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), matrix(n, n, precision.clone()))
        .prop_map(move |(perm, m)| {
            let cap = Valuation::Finite(precision.clone());
            let mut u = NovMatrix::identity(n, cap.clone());
            for i in 0..n {
                for j in i + 1..n {
                    u.set(i, j, m.get(i, j).clone());
                }
            }
            let mut pm = NovMatrix::zeros(n, n, cap);
            for (i, &j) in perm.iter().enumerate() {
                pm.set(i, j, NovikovElement::one());
            }
            pm.mul(&u)
        })
}

/// Generator weights on the grid `k/4` in `[−2, 2]`.
pub fn weights(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-8i64..=8).prop_map(|k| q(k, 4)), n)
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use novarch::complexes::ValuedComplex;

/// `d' = U d U⁻¹` for a random unipotent `U` mixing generators of equal
/// degree with `val(u_ij) ≥ max(0, w_j − w_i)`, so both the norm and the
/// lattice are preserved. Nonconstant entries have valuation at least
/// `gap`, which keeps the `d₀ + T^ħ d₁` split when `gap = ħ`.
/// `allowed(i, j)` filters the entries.
pub fn isometric_change(c: &ValuedComplex, seed: u64, gap: &Rat, allowed: impl Fn(usize, usize) -> bool) -> ValuedComplex {
    let (u, inv) = unipotent(c, seed, gap, allowed);
    ValuedComplex { d: u.mul(&c.d).mul(&inv), ..c.clone() }
}

/// The `(U, U⁻¹)` used by `isometric_change`.
pub fn unipotent(c: &ValuedComplex, seed: u64, gap: &Rat, allowed: impl Fn(usize, usize) -> bool) -> (NovMatrix, NovMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.len();
    let cap = c.cap();
    let w = &c.basis.weights;
    let mut u = NovMatrix::identity(n, cap.clone());
    for j in 0..n {
        for i in 0..j {
            if c.basis.degrees[i] != c.basis.degrees[j] || !allowed(i, j) || rng.gen_bool(0.4) {
                continue;
            }
            let floor = (&w[j] - &w[i]).max(Rat::ZERO);
            let e = if floor.is_zero() && rng.gen_bool(0.5) {
                Rat::ZERO
            } else {
                &floor.max(gap.clone()) + &q(rng.gen_range(0..=4), 4)
            };
            let coeff = Rat::int(if rng.gen_bool(0.5) { 1 } else { -2 });
            u.set(i, j, NovikovElement::monomial(coeff, e));
        }
    }
    let nil = u.sub(&NovMatrix::identity(n, cap.clone()));
    let mut inv = NovMatrix::identity(n, cap.clone());
    let mut power = NovMatrix::identity(n, cap);
    for _ in 0..n {
        power = power.mul(&nil).neg();
        if power.is_zero() {
            break;
        }
        inv = inv.add(&power);
    }
    (u, inv)
}

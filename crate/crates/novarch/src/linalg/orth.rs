//! Valuation-greedy reduction to orthogonal bases.
//!
//! Repeatedly the globally smallest weighted entry among the remaining
//! vectors is chosen as a pivot and its coordinate is cleared from every
//! other vector. The result is a reduced basis: each vector has a private
//! pivot coordinate realizing its weighted valuation, and every other basis
//! vector vanishes there. Such a basis is orthogonal, and the standard
//! vectors at the non-pivot coordinates span an orthogonal complement.

use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

use super::{axpy, is_zero_vector, weighted_val, NovVector};

#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub vectors: Vec<NovVector>,
    pub pivots: Vec<usize>,
    /// Tracked combinations, transformed alongside `vectors`.
    pub companions: Vec<NovVector>,
    /// Companions of inputs that reduced to zero.
    pub null_companions: Vec<NovVector>,
    pub weights: Vec<Rat>,
    pub precision: Valuation,
}

/// Reduces `vectors` (weights `weights`) to an orthogonal basis of their
/// span. When `companions` is given, the same row operations are applied
/// to it; companions of vectors that vanish are returned separately.
pub fn orthogonal_basis(
    mut vectors: Vec<NovVector>,
    weights: &[Rat],
    companions: Option<Vec<NovVector>>,
    precision: &Valuation,
) -> ReducedBasis {
    let n = weights.len();
    let track = companions.is_some();
    let mut comps = companions.unwrap_or_default();
    let mut active: Vec<usize> = (0..vectors.len()).collect();
    let mut done: Vec<(usize, usize)> = Vec::new();
    loop {
        let mut best: Option<(Valuation, usize, usize)> = None;
        for &idx in &active {
            for q in 0..n {
                let x = &vectors[idx][q];
                if x.is_zero() {
                    continue;
                }
                let key = x.val().plus(&weights[q]);
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, idx, q));
                }
            }
        }
        let Some((_, idx, q)) = best else { break };
        active.retain(|&i| i != idx);
        let inv = match vectors[idx][q].inverse(precision) {
            Ok(inv) => inv,
            Err(_) => unreachable!("pivot is nonzero"),
        };
        let pivot_vec = vectors[idx].clone();
        let pivot_comp = if track { comps[idx].clone() } else { Vec::new() };
        for other in active.iter().copied().chain(done.iter().map(|d| d.0)) {
            let x = &vectors[other][q];
            if x.is_zero() {
                continue;
            }
            let f = -(x * &inv);
            let mut updated = axpy(&vectors[other], &f, &pivot_vec);
            updated[q] = NovikovElement::zero_mod(updated[q].precision().clone());
            vectors[other] = updated;
            if track {
                comps[other] = axpy(&comps[other], &f, &pivot_comp);
            }
        }
        done.push((idx, q));
    }
    let null_companions = if track {
        active.iter().map(|&i| comps[i].clone()).collect()
    } else {
        Vec::new()
    };
    debug_assert!(active.iter().all(|&i| is_zero_vector(&vectors[i])));
    ReducedBasis {
        vectors: done.iter().map(|d| vectors[d.0].clone()).collect(),
        pivots: done.iter().map(|d| d.1).collect(),
        companions: if track { done.iter().map(|d| comps[d.0].clone()).collect() } else { Vec::new() },
        null_companions,
        weights: weights.to_vec(),
        precision: precision.clone(),
    }
}

impl ReducedBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Coordinates `c` and remainder `v − Σ c_i b_i`, the remainder vanishing
    /// at every pivot coordinate.
    pub fn reduce(&self, v: &[NovikovElement]) -> (Vec<NovikovElement>, NovVector) {
        let coeffs: Vec<NovikovElement> = self
            .vectors
            .iter()
            .zip(&self.pivots)
            .map(|(b, &q)| {
                if v[q].is_zero() {
                    NovikovElement::zero()
                } else {
                    &v[q] * &b[q].inverse(&self.precision).expect("pivot is nonzero")
                }
            })
            .collect();
        let mut rem = v.to_vec();
        for (c, b) in coeffs.iter().zip(&self.vectors) {
            if !c.is_zero() {
                rem = axpy(&rem, &-c, b);
            }
        }
        for &q in &self.pivots {
            rem[q] = NovikovElement::zero_mod(rem[q].precision().clone());
        }
        (coeffs, rem)
    }

    /// Valuation of `v` in the quotient by the span: `sup_w val(v + w)`.
    pub fn quotient_val(&self, v: &[NovikovElement]) -> Valuation {
        weighted_val(&self.reduce(v).1, &self.weights)
    }

    /// Coordinates that are not pivots.
    pub fn complement_coordinates(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|q| !self.pivots.contains(q)).collect()
    }

    pub fn contains(&self, v: &[NovikovElement]) -> bool {
        is_zero_vector(&self.reduce(v).1)
    }
}

/// Complement `C` of `span(vectors)` such that
/// `|w + c| ≥ r·max(|w|, |c|)` for every `r < 1`. The complement is spanned
/// by standard basis vectors, returned as coordinate indices.
///
/// Finite rank only: complements in countably generated Banach spaces are
/// not constructed.
pub fn r_orthogonal_complement(vectors: Vec<NovVector>, weights: &[Rat], precision: &Valuation) -> Vec<usize> {
    orthogonal_basis(vectors, weights, None, precision).complement_coordinates()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit_vector;

    fn t(e: i64) -> NovikovElement {
        NovikovElement::t_pow(Rat::int(e))
    }

    #[test]
    fn complement_of_tilted_line_is_second_axis() {
        let v = vec![vec![NovikovElement::one(), t(1)]];
        let c = r_orthogonal_complement(v, &[Rat::ZERO, Rat::ZERO], &Valuation::Finite(Rat::int(10)));
        assert_eq!(c, vec![1]);
    }

    #[test]
    fn dependent_vectors_leave_kernel_companions() {
        let a = vec![NovikovElement::one(), t(1)];
        let b = vec![t(2), t(3)];
        let comps = vec![unit_vector(2, 0), unit_vector(2, 1)];
        let red = orthogonal_basis(vec![a, b], &[Rat::ZERO, Rat::ZERO], Some(comps), &Valuation::Infinite);
        assert_eq!(red.len(), 1);
        assert_eq!(red.null_companions.len(), 1);
        let z = &red.null_companions[0];
        // z = e1 − T² e0
        assert!(z[1].eq_mod(&NovikovElement::one()));
        assert!(z[0].eq_mod(&-t(2)));
    }

    #[test]
    fn quotient_valuation_of_line() {
        let red = orthogonal_basis(vec![vec![NovikovElement::one(), t(1)]], &[Rat::ZERO, Rat::ZERO], None, &Valuation::Infinite);
        let v = vec![NovikovElement::one(), NovikovElement::zero()];
        assert_eq!(red.quotient_val(&v), Valuation::Finite(Rat::ONE));
    }
}

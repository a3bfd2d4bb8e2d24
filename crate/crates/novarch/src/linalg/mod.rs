//! Valued linear algebra over the Novikov field: matrices, weighted
//! valuations, Smith normal form over the valuation ring, orthogonal
//! decompositions and operator norms.

mod matrix;
mod orth;
mod snf;

pub use matrix::NovMatrix;
pub use orth::{orthogonal_basis, r_orthogonal_complement, ReducedBasis};
pub use snf::{smith_normal_form, SmithForm};

use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

/// Default working precision `E`.
pub fn default_precision() -> Rat {
    Rat::int(10)
}

/// Default pivot slack below the working precision.
pub fn default_slack() -> Rat {
    Rat::ONE
}

pub type NovVector = Vec<NovikovElement>;

/// Generators of a finite-rank normed Λ-module together with the valuation
/// of each generator. The basis is orthogonal by construction: the norm of
/// `Σ c_i e_i` is `max |c_i| e^{−w_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuedBasis {
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
    pub weights: Vec<Rat>,
}

impl ValuedBasis {
    pub fn new(names: Vec<String>, degrees: Vec<i64>, weights: Vec<Rat>) -> Self {
        assert_eq!(names.len(), degrees.len());
        assert_eq!(names.len(), weights.len());
        ValuedBasis { names, degrees, weights }
    }

    /// Unnamed generators of degree 0 with the given weights.
    pub fn from_weights(weights: Vec<Rat>) -> Self {
        let n = weights.len();
        ValuedBasis { names: (0..n).map(|i| format!("e{i}")).collect(), degrees: vec![0; n], weights }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Same generators with all weights zero: the valuation relative to the
    /// lattice spanned by the basis.
    pub fn relative(&self) -> Self {
        ValuedBasis { weights: vec![Rat::ZERO; self.len()], ..self.clone() }
    }

    pub fn indices_in_degree(&self, k: i64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == k).collect()
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        ValuedBasis {
            names: idx.iter().map(|&i| self.names[i].clone()).collect(),
            degrees: idx.iter().map(|&i| self.degrees[i]).collect(),
            weights: idx.iter().map(|&i| self.weights[i].clone()).collect(),
        }
    }
}

/// `min_i val(v_i) + w_i`.
pub fn weighted_val(v: &[NovikovElement], weights: &[Rat]) -> Valuation {
    v.iter().zip(weights).map(|(x, w)| x.val().plus(w)).min().unwrap_or(Valuation::Infinite)
}

pub fn is_zero_vector(v: &[NovikovElement]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn zero_vector(n: usize) -> NovVector {
    vec![NovikovElement::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> NovVector {
    let mut v = zero_vector(n);
    v[i] = NovikovElement::one();
    v
}

/// `a + c·b` entrywise.
pub fn axpy(a: &[NovikovElement], c: &NovikovElement, b: &[NovikovElement]) -> NovVector {
    a.iter().zip(b).map(|(x, y)| if y.is_zero() { x.clone() } else { x + &(c * y) }).collect()
}

/// Operator valuation `−log |f|_∞` of `f` from `source` to `target`.
pub fn operator_norm_val(f: &NovMatrix, source: &[Rat], target: &[Rat]) -> Valuation {
    assert_eq!(f.cols(), source.len());
    assert_eq!(f.rows(), target.len());
    let mut best = Valuation::Infinite;
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            let v = f.get(i, j).val().plus(&(&target[i] - &source[j]));
            best = best.min(v);
        }
    }
    best
}

/// `|f|_∞` as a float.
pub fn operator_norm(f: &NovMatrix, source: &[Rat], target: &[Rat]) -> f64 {
    operator_norm_val(f, source, target).norm()
}

/// Rank over the field Λ.
pub fn rank(f: &NovMatrix) -> usize {
    let cols: Vec<NovVector> = (0..f.cols()).map(|j| f.column(j)).collect();
    let w = vec![Rat::ZERO; f.rows()];
    orthogonal_basis(cols, &w, None, f.precision()).vectors.len()
}

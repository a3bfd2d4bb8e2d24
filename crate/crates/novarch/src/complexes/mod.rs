//! Filtered cochain complexes: Floer-type complexes, homology barcodes over
//! the valuation ring, telescopes of rays, and reduction to the associated
//! graded.

mod barcode;
mod floer;
mod telescope;

pub use barcode::{homology_barcode, DegreeBars, TorsionBarcode, Weighting};
pub use floer::{
    associated_graded, quotient_outside, validate_floer_type, Condition, FloerTypeComplex, ReducedComplex,
    ValidationReport, Violation,
};
pub use telescope::{build_telescope, reduced_telescope, OneRay, TelescopeComplex};

use crate::error::{Error, Result};
use crate::linalg::{NovMatrix, ValuedBasis};
use crate::novikov::Valuation;
use crate::rational::Rat;

/// Cohomological grading: the differential raises degree by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    Z,
    Z2,
}

impl Grading {
    pub fn target(self, k: i64) -> i64 {
        match self {
            Grading::Z => k + 1,
            Grading::Z2 => (k + 1).rem_euclid(2),
        }
    }

    pub fn source(self, k: i64) -> i64 {
        match self {
            Grading::Z => k - 1,
            Grading::Z2 => (k - 1).rem_euclid(2),
        }
    }

    pub fn normalize(self, k: i64) -> i64 {
        match self {
            Grading::Z => k,
            Grading::Z2 => k.rem_euclid(2),
        }
    }
}

/// A finite-rank complex over Λ with an orthogonal valued basis. The
/// differential is stored as a square matrix in that basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuedComplex {
    pub basis: ValuedBasis,
    pub grading: Grading,
    pub d: NovMatrix,
    pub precision: Rat,
}

impl ValuedComplex {
    pub fn new(basis: ValuedBasis, grading: Grading, d: NovMatrix, precision: Rat) -> Result<Self> {
        let n = basis.len();
        if d.rows() != n || d.cols() != n {
            return Err(Error::DimensionMismatch(format!("differential is {}x{}, basis has {n} generators", d.rows(), d.cols())));
        }
        let mut basis = basis;
        for k in basis.degrees.iter_mut() {
            *k = grading.normalize(*k);
        }
        let d = d.truncate(&Valuation::Finite(precision.clone()));
        Ok(ValuedComplex { basis, grading, d, precision })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn cap(&self) -> Valuation {
        Valuation::Finite(self.precision.clone())
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut ds = self.basis.degrees.clone();
        ds.sort();
        ds.dedup();
        ds
    }

    /// First entry of the differential that does not raise degree by one.
    pub fn degree_violation(&self) -> Option<(usize, usize)> {
        self.d
            .nonzero_entries()
            .find(|&(i, j, _)| self.basis.degrees[i] != self.grading.target(self.basis.degrees[j]))
            .map(|(i, j, _)| (i, j))
    }

    /// `d_k : C^k → C^{k+1}` with the source and target index sets.
    pub fn block(&self, k: i64) -> (Vec<usize>, Vec<usize>, NovMatrix) {
        let src = self.basis.indices_in_degree(k);
        let tgt = self.basis.indices_in_degree(self.grading.target(k));
        let m = self.d.submatrix(&tgt, &src);
        (src, tgt, m)
    }

    pub fn square_vanishes(&self) -> bool {
        self.d.mul(&self.d).is_zero()
    }

    /// Same complex measured relative to the lattice of the basis.
    pub fn relative(&self) -> ValuedComplex {
        ValuedComplex { basis: self.basis.relative(), ..self.clone() }
    }

    /// Differential entries rescaled to unit-norm generators; a norm
    /// non-increasing differential has all entries in `Λ_{≥0}` here.
    pub fn normalized_differential(&self) -> NovMatrix {
        self.d.normalized(&self.basis.weights, &self.basis.weights).truncate(&Valuation::Infinite)
    }

    /// Image under `T ↦ T^t`; generator valuations and precision scale by `t`.
    pub fn rescale(&self, t: &Rat) -> ValuedComplex {
        ValuedComplex {
            basis: ValuedBasis { weights: self.basis.weights.iter().map(|w| w * t).collect(), ..self.basis.clone() },
            grading: self.grading,
            d: self.d.rescale_exponents(t),
            precision: &self.precision * t,
        }
    }
}

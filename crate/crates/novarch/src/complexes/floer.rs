use crate::error::{Error, Result};
use crate::linalg::{NovMatrix, ValuedBasis};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

use super::{homology_barcode, Grading, ValuedComplex, Weighting};

/// Conditions checked by [`validate_floer_type`], in checking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Degree,
    /// Entries in `Λ_{≥0}` relative to the lattice basis.
    Filtration,
    /// `d − d₀` has no terms below `T^ħ`.
    Split,
    /// `|dx| ≤ |x|`.
    NormNonIncreasing,
    SquareZero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub generator: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// A complex `d = d₀ + T^ħ d₁` over Λ with `d₀` ground-field valued and `d₁`
/// over `Λ_{≥0}`, written in a lattice basis whose generators carry norm
/// valuations (actions). Generators flagged `outside` are expected to span an
/// acyclic subcomplex of the reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct FloerTypeComplex {
    pub complex: ValuedComplex,
    pub hbar: Rat,
    pub d0: NovMatrix,
    pub d1: NovMatrix,
    pub outside: Vec<bool>,
}

fn split(d: &NovMatrix, hbar: &Rat) -> (NovMatrix, NovMatrix) {
    let d0 = d.map(|x| NovikovElement::constant(x.coefficient(&Rat::ZERO)));
    let shift = -hbar;
    let rest = d.sub(&d0).map(|x| x.shift(&shift));
    (d0.truncate(&Valuation::Infinite), rest)
}

/// Checks every condition and lists all violations; the first violated
/// condition comes first, each with a witness generator.
pub fn validate_floer_type(c: &ValuedComplex, hbar: &Rat) -> ValidationReport {
    let mut report = ValidationReport::default();
    let name = |j: usize| c.basis.names[j].clone();
    if !hbar.is_positive() {
        report.violations.push(Violation { condition: Condition::Split, generator: String::new(), detail: format!("hbar = {hbar} must be positive") });
    }
    for (i, j, _) in c.d.nonzero_entries() {
        if c.basis.degrees[i] != c.grading.target(c.basis.degrees[j]) {
            report.violations.push(Violation {
                condition: Condition::Degree,
                generator: name(j),
                detail: format!("d({}) has a component on {} in the wrong degree", name(j), name(i)),
            });
        }
    }
    for (i, j, x) in c.d.nonzero_entries() {
        if x.val().lt_rat(&Rat::ZERO) {
            report.violations.push(Violation {
                condition: Condition::Filtration,
                generator: name(j),
                detail: format!("coefficient of {} in d({}) has valuation {}", name(i), name(j), x.val()),
            });
        }
    }
    for (i, j, x) in c.d.nonzero_entries() {
        if let Some((e, _)) = x.terms().iter().find(|(e, _)| e.is_positive() && e < hbar) {
            report.violations.push(Violation {
                condition: Condition::Split,
                generator: name(j),
                detail: format!("coefficient of {} in d({}) has a term T^{e} below T^hbar", name(i), name(j)),
            });
        }
    }
    let w = &c.basis.weights;
    for (i, j, x) in c.d.nonzero_entries() {
        if x.val().plus(&(&w[i] - &w[j])).lt_rat(&Rat::ZERO) {
            report.violations.push(Violation {
                condition: Condition::NormNonIncreasing,
                generator: name(j),
                detail: format!("|d({})| exceeds its norm through {}", name(j), name(i)),
            });
        }
    }
    let sq = c.d.mul(&c.d);
    if let Some((_, j, _)) = sq.nonzero_entries().next() {
        report.violations.push(Violation { condition: Condition::SquareZero, generator: name(j), detail: format!("d^2({}) ≠ 0 mod T^E", name(j)) });
    }
    report.violations.sort_by_key(|v| v.condition as u8);
    report
}

impl FloerTypeComplex {
    pub fn new(complex: ValuedComplex, hbar: Rat, outside: Vec<bool>) -> Result<Self> {
        if outside.len() != complex.len() {
            return Err(Error::DimensionMismatch("outside flags do not match the basis".into()));
        }
        let report = validate_floer_type(&complex, &hbar);
        if let Some(v) = report.first() {
            return Err(Error::InvalidComplex(format!("{:?} at {}: {}", v.condition, v.generator, v.detail)));
        }
        let (d0, d1) = split(&complex.d, &hbar);
        Ok(FloerTypeComplex { complex, hbar, d0, d1, outside })
    }

    /// Builds from raw parts, with no generator flagged outside.
    pub fn from_parts(basis: ValuedBasis, grading: Grading, d: NovMatrix, hbar: Rat, precision: Rat) -> Result<Self> {
        let n = basis.len();
        FloerTypeComplex::new(ValuedComplex::new(basis, grading, d, precision)?, hbar, vec![false; n])
    }

    pub fn basis(&self) -> &ValuedBasis {
        &self.complex.basis
    }

    pub fn precision(&self) -> &Rat {
        &self.complex.precision
    }

    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    /// `T^ħ d₁ = d − d₀`.
    pub fn perturbation(&self) -> NovMatrix {
        self.d1.map(|x| x.shift(&self.hbar)).truncate(&self.complex.cap())
    }

    pub fn rescale(&self, t: &Rat) -> Result<FloerTypeComplex> {
        FloerTypeComplex::new(self.complex.rescale(t), &self.hbar * t, self.outside.clone())
    }
}

/// `(G, d₀)`: the reduction of a Floer-type complex modulo `T^ħ`, whose
/// coefficients are ground-field constants representing `Λ_{[0,ħ)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedComplex {
    pub complex: ValuedComplex,
    pub hbar: Rat,
    pub outside: Vec<bool>,
}

pub fn associated_graded(c: &FloerTypeComplex) -> ReducedComplex {
    let complex = ValuedComplex { d: c.d0.truncate(&c.complex.cap()), ..c.complex.clone() };
    ReducedComplex { complex, hbar: c.hbar.clone(), outside: c.outside.clone() }
}

/// Quotient of the reduced complex by the span of the flagged generators.
/// The flagged span must be a subcomplex with vanishing homology over the
/// valuation ring; then the quotient has the same barcode.
pub fn quotient_outside(r: &ReducedComplex) -> Result<ReducedComplex> {
    let c = &r.complex;
    let flagged: Vec<usize> = (0..c.len()).filter(|&i| r.outside[i]).collect();
    let kept: Vec<usize> = (0..c.len()).filter(|&i| !r.outside[i]).collect();
    for (i, j, _) in c.d.nonzero_entries() {
        if r.outside[j] && !r.outside[i] {
            return Err(Error::NotSubcomplex { from: c.basis.names[j].clone(), to: c.basis.names[i].clone() });
        }
    }
    let sub = ValuedComplex {
        basis: c.basis.subset(&flagged),
        grading: c.grading,
        d: c.d.submatrix(&flagged, &flagged),
        precision: c.precision.clone(),
    };
    let bars = homology_barcode(&sub, Weighting::Norm, &crate::linalg::default_slack())?;
    if bars.total_free_rank() > 0 || bars.max_torsion().is_some() {
        return Err(Error::NotAcyclic(format!("free rank {}, torsion {:?}", bars.total_free_rank(), bars.max_torsion())));
    }
    let quotient = ValuedComplex {
        basis: c.basis.subset(&kept),
        grading: c.grading,
        d: c.d.submatrix(&kept, &kept),
        precision: c.precision.clone(),
    };
    Ok(ReducedComplex { complex: quotient, hbar: r.hbar.clone(), outside: vec![false; kept.len()] })
}

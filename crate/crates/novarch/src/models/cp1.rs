use crate::complexes::{FloerTypeComplex, Grading, ValuedComplex};
use crate::error::{Error, Result};
use crate::linalg::{NovMatrix, NovVector, ValuedBasis};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

/// The two-term model `Λ[x, ∂x]` with `dx^i∂x = T^r x^i + T^{1−r} x^{i+2}`,
/// written in the lattice basis `y^i = T^{−ir}x^i`, `z^i = T^{−(i+1)r}x^i∂x`
/// where `dz^i = y^i + T·y^{i+2}`.
///
/// Truncation keeps `y^0..y^N`. For `r < 1/2` every `z^i`, `i ≤ N`, is kept and
/// the out-of-range term `T·y^{i+2}` (the norm-subdominant one) is dropped,
/// so `d` stays an isomorphism. For `r ≥ 1/2` that term dominates in norm and
/// cannot be dropped; `z^i` is kept only for `i + 2 ≤ N`.
#[derive(Clone, Debug)]
pub struct Cp1Model {
    pub r: Rat,
    pub truncation: usize,
    pub complex: FloerTypeComplex,
}

pub fn cp1_hbar(r: &Rat) -> Rat {
    let gap = (&Rat::ONE - &(&Rat::int(2) * r)).abs();
    if gap.is_zero() {
        Rat::ONE
    } else {
        gap
    }
}

pub fn cp1_model(r: &Rat, truncation: usize, precision: &Rat) -> Result<Cp1Model> {
    if !(r.is_positive() && r < &Rat::ONE) {
        return Err(Error::Invalid(format!("r = {r} must lie in (0, 1)")));
    }
    if truncation < 4 {
        return Err(Error::Invalid("truncation must be at least 4".into()));
    }
    let n = truncation;
    let small = r < &Rat::new(1, 2);
    let odd: Vec<usize> = if small { (0..=n).collect() } else { (0..=n - 2).collect() };
    let mut names = Vec::new();
    let mut degrees = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=n {
        names.push(format!("y{i}"));
        degrees.push(0);
        weights.push(-(r * &Rat::int(i as i64)));
    }
    for &i in &odd {
        names.push(format!("z{i}"));
        degrees.push(1);
        weights.push(-(r * &Rat::int(i as i64 + 1)));
    }
    let total = names.len();
    let cap = Valuation::Finite(precision.clone());
    let mut d = NovMatrix::zeros(total, total, cap);
    for (k, &i) in odd.iter().enumerate() {
        let col = n + 1 + k;
        d.set(i, col, NovikovElement::one());
        if i + 2 <= n {
            d.set(i + 2, col, NovikovElement::t_pow(Rat::ONE));
        }
    }
    let basis = ValuedBasis::new(names, degrees, weights);
    let complex = ValuedComplex::new(basis, Grading::Z2, d, precision.clone())?;
    let complex = FloerTypeComplex::new(complex, cp1_hbar(r), vec![false; total])?;
    Ok(Cp1Model { r: r.clone(), truncation, complex })
}

impl Cp1Model {
    /// The cycle `y^i` as a coordinate vector.
    pub fn even_generator(&self, i: usize) -> NovVector {
        let mut v = vec![NovikovElement::zero(); self.complex.len()];
        v[i] = NovikovElement::one();
        v
    }

    /// Inclusion into a larger truncation, matching generators by name.
    pub fn inclusion_into(&self, larger: &Cp1Model) -> Result<NovMatrix> {
        let (a, b) = (self.complex.basis(), larger.complex.basis());
        let mut m = NovMatrix::zeros(b.len(), a.len(), Valuation::Finite(self.complex.precision().clone()));
        for (j, name) in a.names.iter().enumerate() {
            let i = b.index_of(name).ok_or_else(|| Error::Invalid(format!("{name} missing from the larger model")))?;
            m.set(i, j, NovikovElement::one());
        }
        Ok(m)
    }
}

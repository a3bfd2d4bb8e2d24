use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

use super::model::{AffElement, AffinoidModel, Monomial};

/// A commutative bilinear product on a model.
pub trait StarProduct: fmt::Debug + Send + Sync {
    /// `e_a * e_b`.
    fn basis_product(&self, model: &AffinoidModel, a: &[i64], b: &[i64]) -> AffElement;

    /// Bilinear extension of `basis_product`.
    fn product(&self, model: &AffinoidModel, x: &AffElement, y: &AffElement) -> AffElement {
        let mut acc = AffElement::default();
        for (a, ca) in &x.terms {
            for (b, cb) in &y.terms {
                acc = acc.add(&self.basis_product(model, a, b).scale(&(ca * cb)));
            }
        }
        model.normalize(&acc)
    }
}

/// `x * y = xy`.
#[derive(Clone, Debug, Default)]
pub struct ReferenceStar;

impl StarProduct for ReferenceStar {
    fn basis_product(&self, model: &AffinoidModel, a: &[i64], b: &[i64]) -> AffElement {
        model.mul(&model.basis_element(a.to_vec()), &model.basis_element(b.to_vec()))
    }

    fn product(&self, model: &AffinoidModel, x: &AffElement, y: &AffElement) -> AffElement {
        model.mul(x, y)
    }
}

/// `x * y = xy·g`: commutative and associative, with unit `g⁻¹`.
#[derive(Clone, Debug)]
pub struct TwistStar {
    pub twist: AffElement,
}

impl StarProduct for TwistStar {
    fn basis_product(&self, model: &AffinoidModel, a: &[i64], b: &[i64]) -> AffElement {
        let ab = model.mul(&model.basis_element(a.to_vec()), &model.basis_element(b.to_vec()));
        model.mul(&ab, &self.twist)
    }

    fn product(&self, model: &AffinoidModel, x: &AffElement, y: &AffElement) -> AffElement {
        model.mul(&model.mul(x, y), &self.twist)
    }
}

/// Explicit products on listed basis pairs; unlisted pairs use the
/// reference product. Keys are stored with the smaller monomial first.
#[derive(Clone, Debug, Default)]
pub struct TableStar {
    pub table: BTreeMap<(Monomial, Monomial), AffElement>,
}

impl TableStar {
    pub fn insert(&mut self, a: Monomial, b: Monomial, value: AffElement) {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.table.insert(key, value);
    }
}

impl StarProduct for TableStar {
    fn basis_product(&self, model: &AffinoidModel, a: &[i64], b: &[i64]) -> AffElement {
        let key = if a <= b { (a.to_vec(), b.to_vec()) } else { (b.to_vec(), a.to_vec()) };
        match self.table.get(&key) {
            Some(v) => model.normalize(v),
            None => ReferenceStar.basis_product(model, a, b),
        }
    }
}

/// `δ(x, y) = x * y − xy`.
pub fn defect(model: &AffinoidModel, star: &dyn StarProduct, x: &AffElement, y: &AffElement) -> AffElement {
    star.product(model, x, y).sub(&model.mul(x, y))
}

/// A product together with its closeness `c = e^{−γ}`, verified on all
/// basis pairs: `val(e_a * e_b − e_a e_b) > γ + val(e_a e_b)`.
#[derive(Debug)]
pub struct ProductPerturbation {
    pub star: Box<dyn StarProduct>,
    /// `γ` with `c = e^{−γ}`.
    pub closeness: Rat,
    /// Smallest observed `val(δ(e_a, e_b)) − val(e_a e_b)`.
    pub observed_gap: Valuation,
}

impl ProductPerturbation {
    pub fn new(model: &AffinoidModel, star: Box<dyn StarProduct>, closeness: Rat) -> Result<Self> {
        let basis = model.basis();
        let mut observed_gap = Valuation::Infinite;
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i..] {
                let xy = ReferenceStar.basis_product(model, a, b);
                let d = star.basis_product(model, a, b).sub(&xy);
                let dv = model.normalize(&d).val();
                if dv.is_infinite() {
                    continue;
                }
                let Valuation::Finite(pv) = xy.val() else {
                    return Err(Error::NotClose(format!("{a:?} * {b:?} is nonzero where the product vanishes")));
                };
                let gap = dv.minus(&pv);
                if gap <= Valuation::Finite(closeness.clone()) {
                    return Err(Error::NotClose(format!("on {a:?} * {b:?} the defect has relative valuation {gap}, not above {closeness}")));
                }
                observed_gap = observed_gap.min(gap);
            }
        }
        Ok(ProductPerturbation { star, closeness, observed_gap })
    }

    /// `c = e^{−γ}` as a float.
    pub fn c(&self) -> f64 {
        Valuation::Finite(self.closeness.clone()).norm()
    }
}

/// `1 + T^λ·u`.
pub fn twist_by(model: &AffinoidModel, lambda: &Rat, u: &AffElement) -> TwistStar {
    TwistStar { twist: model.normalize(&model.one().add(&u.scale(&NovikovElement::t_pow(lambda.clone())))) }
}

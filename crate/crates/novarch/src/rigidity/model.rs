use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

/// Exponent vector: Tate exponents first, then one signed index per annulus.
pub type Monomial = Vec<i64>;

/// `{|x₁| ≤ e^{r₁}, |x₂| ≤ e^{r₂}, x₁x₂ = 1}` with the orthonormal basis
/// `e_k = z₁^k` (`k ≥ 0`), `e_k = z₂^{−k}` (`k < 0`), `z_i = e^{−r_i}x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusFactor {
    pub r1: Rat,
    pub r2: Rat,
}

impl AnnulusFactor {
    /// `z₁z₂ = T^s`.
    pub fn width(&self) -> Rat {
        &self.r1 + &self.r2
    }
}

/// A truncated affinoid algebra with orthonormal monomial basis.
///
/// Tate monomials of total degree above `N` span an ideal and are dropped
/// exactly. Annulus indices are not bounded by an ideal; a coefficient at
/// index `k` is carried to precision `E − s(|k| − N)₊`, which every product
/// of unit-ball elements preserves, and dropped once that is nonpositive.
/// Claims are therefore exact mod `T^E` on `|k| ≤ N`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinoidModel {
    pub tate_vars: usize,
    pub annuli: Vec<AnnulusFactor>,
    pub truncation: usize,
    pub precision: Rat,
}

/// A finite sum of monomials with Novikov coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffElement {
    pub terms: BTreeMap<Monomial, NovikovElement>,
}

impl AffElement {
    pub fn monomial(m: Monomial, c: NovikovElement) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        AffElement { terms }
    }

    pub fn coefficient(&self, m: &[i64]) -> NovikovElement {
        self.terms.get(m).cloned().unwrap_or_else(NovikovElement::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sup-norm valuation in the orthonormal basis.
    pub fn val(&self) -> Valuation {
        self.terms.values().map(NovikovElement::val).min().unwrap_or(Valuation::Infinite)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let s = match terms.get(m) {
                Some(x) => x + c,
                None => c.clone(),
            };
            if s.is_zero() {
                terms.remove(m);
            } else {
                terms.insert(m.clone(), s);
            }
        }
        AffElement { terms }
    }

    pub fn neg(&self) -> Self {
        AffElement { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &NovikovElement) -> Self {
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).filter(|(_, x)| !x.is_zero()).collect();
        AffElement { terms }
    }

    pub fn shift(&self, e: &Rat) -> Self {
        AffElement { terms: self.terms.iter().map(|(m, x)| (m.clone(), x.shift(e))).collect() }
    }
}

impl AffinoidModel {
    pub fn tate(vars: usize, truncation: usize, precision: Rat) -> Self {
        AffinoidModel { tate_vars: vars, annuli: Vec::new(), truncation, precision }
    }

    pub fn polyannulus(annuli: Vec<AnnulusFactor>, truncation: usize, precision: Rat) -> Result<Self> {
        if annuli.is_empty() {
            return Err(Error::Invalid("a polyannulus needs at least one factor".into()));
        }
        let model = AffinoidModel { tate_vars: 0, annuli, truncation, precision };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.annuli.iter().find(|a| a.r1.is_negative() || a.r2.is_negative() || !a.width().is_positive()) {
            return Err(Error::Invalid(format!("annulus radii ({}, {}) must be nonnegative with positive sum", a.r1, a.r2)));
        }
        if !self.precision.is_positive() {
            return Err(Error::Invalid("precision must be positive".into()));
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.tate_vars + self.annuli.len()
    }

    /// Same model carried to a higher precision.
    pub fn with_precision(&self, precision: Rat) -> Self {
        AffinoidModel { precision, ..self.clone() }
    }

    fn tate_degree(&self, m: &[i64]) -> i64 {
        m[..self.tate_vars].iter().sum()
    }

    /// Precision carried at `m` for the target precision `e`.
    pub fn profile_at(&self, m: &[i64], e: &Rat) -> Rat {
        let n = self.truncation as i64;
        let mut p = e.clone();
        for (a, &k) in self.annuli.iter().zip(&m[self.tate_vars..]) {
            let excess = k.abs() - n;
            if excess > 0 {
                p = &p - &(&a.width() * &Rat::int(excess));
            }
        }
        p
    }

    pub fn profile(&self, m: &[i64]) -> Rat {
        self.profile_at(m, &self.precision)
    }

    pub fn in_window(&self, m: &[i64]) -> bool {
        self.tate_degree(m) <= self.truncation as i64 && self.profile(m).is_positive()
    }

    /// Basis monomials: Tate degree and every annulus index bounded by `N`.
    pub fn basis(&self) -> Vec<Monomial> {
        self.grid(self.truncation as i64)
    }

    fn grid(&self, annulus_bound: i64) -> Vec<Monomial> {
        let n = self.truncation as i64;
        let mut out: Vec<Monomial> = vec![Vec::new()];
        for _ in 0..self.tate_vars {
            out = out
                .into_iter()
                .flat_map(|m| {
                    let used: i64 = m.iter().sum();
                    (0..=n - used).map(move |e| {
                        let mut m = m.clone();
                        m.push(e);
                        m
                    })
                })
                .collect();
        }
        for _ in &self.annuli {
            out = out
                .into_iter()
                .flat_map(|m| {
                    (-annulus_bound..=annulus_bound).map(move |k| {
                        let mut m = m.clone();
                        m.push(k);
                        m
                    })
                })
                .collect();
        }
        out
    }

    /// Largest annulus index with positive precision, per factor.
    pub fn window_reach(&self) -> i64 {
        let n = self.truncation as i64;
        let extra = self
            .annuli
            .iter()
            .map(|a| {
                let q = (&self.precision / &a.width()).ceil();
                i64::try_from(q).unwrap_or(0) - 1
            })
            .max()
            .unwrap_or(0);
        n + extra.max(0)
    }

    /// Basis monomials together with the annulus indices past `N` that
    /// still carry precision.
    pub fn window(&self) -> Vec<Monomial> {
        self.grid(self.window_reach()).into_iter().filter(|m| self.in_window(m)).collect()
    }

    pub fn in_basis(&self, m: &[i64]) -> bool {
        let n = self.truncation as i64;
        m.len() == self.arity() && self.tate_degree(m) <= n && m[self.tate_vars..].iter().all(|k| k.abs() <= n)
    }

    pub fn one(&self) -> AffElement {
        AffElement::monomial(vec![0; self.arity()], NovikovElement::one())
    }

    pub fn basis_element(&self, m: Monomial) -> AffElement {
        AffElement::monomial(m, NovikovElement::one())
    }

    /// The Tate variable `x_i`.
    pub fn tate_var(&self, i: usize) -> AffElement {
        let mut m = vec![0; self.arity()];
        m[i] = 1;
        self.basis_element(m)
    }

    /// `z₁` (`sign = 1`) or `z₂` (`sign = −1`) of annulus factor `j`.
    pub fn annulus_var(&self, j: usize, sign: i64) -> AffElement {
        let mut m = vec![0; self.arity()];
        m[self.tate_vars + j] = sign;
        self.basis_element(m)
    }

    /// `e_a · e_b = T^{shift} e_{a+b}`; `None` when the product is zero in
    /// the truncation or leaves the working window.
    pub fn monomial_product(&self, a: &[i64], b: &[i64]) -> Option<(Rat, Monomial)> {
        let m: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
        if !self.in_window(&m) {
            return None;
        }
        let mut shift = Rat::ZERO;
        for (j, f) in self.annuli.iter().enumerate() {
            let i = self.tate_vars + j;
            let rho = (a[i].abs() + b[i].abs() - m[i].abs()) / 2;
            if rho != 0 {
                shift = &shift + &(&f.width() * &Rat::int(rho));
            }
        }
        Some((shift, m))
    }

    /// Caps every coefficient at its precision profile.
    pub fn normalize(&self, x: &AffElement) -> AffElement {
        let mut terms = BTreeMap::new();
        for (m, c) in &x.terms {
            if !self.in_window(m) {
                continue;
            }
            let c = c.truncate(&Valuation::Finite(self.profile(m)));
            if !c.is_zero() {
                terms.insert(m.clone(), c);
            }
        }
        AffElement { terms }
    }

    /// The reference product.
    pub fn mul(&self, a: &AffElement, b: &AffElement) -> AffElement {
        let mut acc: BTreeMap<Monomial, NovikovElement> = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let Some((shift, m)) = self.monomial_product(ma, mb) else { continue };
                let term = (ca * cb).shift(&shift);
                let slot = acc.entry(m).or_insert_with(NovikovElement::zero);
                *slot = &*slot + &term;
            }
        }
        self.normalize(&AffElement { terms: acc })
    }

    /// `a ≡ b` mod `T^e` under the precision profile.
    pub fn eq_mod(&self, a: &AffElement, b: &AffElement, e: &Rat) -> bool {
        let diff = a.sub(b);
        diff.terms.iter().all(|(m, c)| {
            let p = self.profile_at(m, e);
            !p.is_positive() || c.truncate(&Valuation::Finite(p)).is_zero()
        })
    }

    /// The valuation of `x` on the basis window mod `T^e`.
    pub fn val_mod(&self, x: &AffElement, e: &Rat) -> Valuation {
        x.terms
            .iter()
            .filter(|(m, _)| self.in_basis(m))
            .map(|(_, c)| c.truncate(&Valuation::Finite(e.clone())).val())
            .min()
            .unwrap_or(Valuation::Infinite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus(n: usize) -> AffinoidModel {
        AffinoidModel::polyannulus(vec![AnnulusFactor { r1: Rat::ONE, r2: Rat::ONE }], n, Rat::int(10)).unwrap()
    }

    #[test]
    fn annulus_relation() {
        let a = annulus(4);
        let p = a.mul(&a.annulus_var(0, 1), &a.annulus_var(0, -1));
        assert!(a.eq_mod(&p, &a.one().shift(&Rat::int(2)), &a.precision));
        assert_eq!(p.val(), Valuation::Finite(Rat::int(2)));
    }

    #[test]
    fn tate_truncation_is_an_ideal() {
        let t = AffinoidModel::tate(2, 3, Rat::int(10));
        let x = t.tate_var(0);
        let x2 = t.mul(&x, &x);
        let x4 = t.mul(&x2, &x2);
        assert!(x4.is_zero());
        assert_eq!(t.basis().len(), 10);
    }

    #[test]
    fn profile_shrinks_outside_the_basis() {
        let a = annulus(4);
        assert_eq!(a.profile(&[4]), Rat::int(10));
        assert_eq!(a.profile(&[-6]), Rat::int(6));
        assert!(!a.in_window(&[9]));
    }

    #[test]
    fn product_is_associative_on_the_basis() {
        let a = annulus(3);
        let b = a.basis();
        for x in &b {
            for y in &b {
                for z in &b {
                    let (ex, ey, ez) = (a.basis_element(x.clone()), a.basis_element(y.clone()), a.basis_element(z.clone()));
                    let l = a.mul(&a.mul(&ex, &ey), &ez);
                    let r = a.mul(&ex, &a.mul(&ey, &ez));
                    assert!(a.eq_mod(&l, &r, &a.precision));
                }
            }
        }
    }
}

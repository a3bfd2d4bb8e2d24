//! The universal Novikov field over the rationals, truncated to finite
//! precision.
//!
//! An element is a finite sum `Σ c_k T^{λ_k}` with rational exponents
//! together with a precision `P`: the element is only known modulo `T^P`.
//! `Valuation::Infinite` as precision means the element is exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rational::Rat;

/// Rational exponent of `T`.
pub type Exponent = Rat;

/// An exponent or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(Rat),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Valuation::Finite(r) => Some(r),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn plus(&self, r: &Rat) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + r),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    pub fn add(&self, other: &Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }

    /// `self − other` for a finite `other`.
    pub fn minus(&self, r: &Rat) -> Valuation {
        self.plus(&-r)
    }

    pub fn min(self, other: Valuation) -> Valuation {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Valuation) -> Valuation {
        std::cmp::max(self, other)
    }

    /// `e^{−v}` as a float, `0` for `+∞`.
    pub fn norm(&self) -> f64 {
        match self {
            Valuation::Finite(v) => (-v.to_f64()).exp(),
            Valuation::Infinite => 0.0,
        }
    }

    pub fn lt_rat(&self, r: &Rat) -> bool {
        matches!(self, Valuation::Finite(v) if v < r)
    }
}

impl From<Rat> for Valuation {
    fn from(r: Rat) -> Valuation {
        Valuation::Finite(r)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{r}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NovikovElement {
    /// Sorted by strictly increasing exponent, nonzero coefficients, every
    /// exponent below `precision`.
    terms: Vec<(Exponent, Rat)>,
    precision: Valuation,
}

impl NovikovElement {
    pub fn zero() -> Self {
        NovikovElement { terms: Vec::new(), precision: Valuation::Infinite }
    }

    pub fn zero_mod(precision: Valuation) -> Self {
        NovikovElement { terms: Vec::new(), precision }
    }

    pub fn one() -> Self {
        Self::constant(Rat::ONE)
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, Rat::ZERO)
    }

    pub fn monomial(c: Rat, e: Exponent) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NovikovElement { terms: vec![(e, c)], precision: Valuation::Infinite }
    }

    /// `T^e`.
    pub fn t_pow(e: Exponent) -> Self {
        Self::monomial(Rat::ONE, e)
    }

    /// Builds an element from unsorted `(exponent, coefficient)` pairs,
    /// merging repeated exponents and dropping everything at or above the
    /// precision.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, Rat)>, precision: Valuation) -> Self {
        let mut v: Vec<(Exponent, Rat)> = terms.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        NovikovElement { terms: merge_sorted(v, &precision), precision }
    }

    pub fn terms(&self) -> &[(Exponent, Rat)] {
        &self.terms
    }

    pub fn precision(&self) -> &Valuation {
        &self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_infinite()
    }

    /// True when the element vanishes modulo its precision.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn val(&self) -> Valuation {
        match self.terms.first() {
            Some((e, _)) => Valuation::Finite(e.clone()),
            None => Valuation::Infinite,
        }
    }

    /// Valuation capped by the precision: what is certainly known.
    fn effective_val(&self) -> Valuation {
        self.val().min(self.precision.clone())
    }

    pub fn norm(&self) -> f64 {
        self.val().norm()
    }

    pub fn leading(&self) -> Option<(&Exponent, &Rat)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn coefficient(&self, e: &Exponent) -> Rat {
        self.terms
            .binary_search_by(|(x, _)| x.cmp(e))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or(Rat::ZERO)
    }

    /// The coefficient of `T^0` when the element is a ground-field constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.as_slice() {
            [] => Some(Rat::ZERO),
            [(e, c)] if e.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn truncate(&self, precision: &Valuation) -> Self {
        if *precision >= self.precision {
            return self.clone();
        }
        let terms = self.terms.iter().filter(|(e, _)| precision.finite().is_none_or(|p| e < p)).cloned().collect();
        NovikovElement { terms, precision: precision.clone() }
    }

    /// Terms with exponent strictly below `e`, as an exact element.
    pub fn part_below(&self, e: &Exponent) -> Self {
        NovikovElement {
            terms: self.terms.iter().filter(|(x, _)| x < e).cloned().collect(),
            precision: Valuation::Infinite,
        }
    }

    /// Terms with exponent at least `e`, keeping the precision.
    pub fn part_from(&self, e: &Exponent) -> Self {
        NovikovElement {
            terms: self.terms.iter().filter(|(x, _)| x >= e).cloned().collect(),
            precision: self.precision.clone(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return NovikovElement::zero();
        }
        NovikovElement {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            precision: self.precision.clone(),
        }
    }

    /// Multiplication by `T^e`.
    pub fn shift(&self, e: &Exponent) -> Self {
        NovikovElement {
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            precision: self.precision.plus(e),
        }
    }

    fn mul_prec(&self, other: &Self) -> Self {
        let p = self.precision.add(&other.effective_val()).min(other.precision.add(&self.effective_val()));
        NovikovElement::zero_mod(p)
    }

    /// Equality modulo the coarser of the two precisions.
    pub fn eq_mod(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// Inverse of a nonzero element. Writing `a = c·T^v·(1 + u)`, the unit
    /// part is inverted by a geometric series. When `u ≠ 0` or `a` is inexact,
    /// the result is valid modulo `T^{E − 2v}` with `E = min(precision, cap)`.
    pub fn inverse(&self, cap: &Valuation) -> Result<Self> {
        let (v, c) = match self.terms.first() {
            Some((v, c)) => (v.clone(), c.clone()),
            None => return Err(Error::ZeroInversion),
        };
        let cinv = c.recip();
        if self.terms.len() == 1 && self.precision.is_infinite() {
            return Ok(NovikovElement::monomial(cinv, -v));
        }
        let e = self.precision.clone().min(cap.clone());
        let unit_prec = e.minus(&v);
        // u = a / (c T^v) − 1, valuation > 0.
        let u = NovikovElement {
            terms: self.terms[1..].iter().map(|(x, k)| (x - &v, k * &cinv)).collect(),
            precision: self.precision.minus(&v),
        }
        .truncate(&unit_prec);
        let neg_u = -&u;
        let mut sum = NovikovElement::one().truncate(&unit_prec);
        let mut term = sum.clone();
        loop {
            term = (&term * &neg_u).truncate(&unit_prec);
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        let mut w = sum.truncate(&unit_prec);
        w.precision = unit_prec;
        Ok(w.shift(&-&v).scale(&cinv))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = NovikovElement::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Image under the field automorphism `T ↦ T^t` for `t > 0`.
    pub fn rescale_exponents(&self, t: &Rat) -> Self {
        assert!(t.is_positive());
        NovikovElement {
            terms: self.terms.iter().map(|(e, c)| (e * t, c.clone())).collect(),
            precision: match &self.precision {
                Valuation::Finite(p) => Valuation::Finite(p * t),
                Valuation::Infinite => Valuation::Infinite,
            },
        }
    }
}

fn merge_sorted(v: Vec<(Exponent, Rat)>, precision: &Valuation) -> Vec<(Exponent, Rat)> {
    let mut out: Vec<(Exponent, Rat)> = Vec::with_capacity(v.len());
    for (e, c) in v {
        if let Valuation::Finite(p) = precision {
            if &e >= p {
                break;
            }
        }
        match out.last_mut() {
            Some((le, lc)) if *le == e => {
                *lc = &*lc + &c;
                if lc.is_zero() {
                    out.pop();
                }
            }
            _ => {
                if !c.is_zero() {
                    out.push((e, c));
                }
            }
        }
    }
    out
}

impl PartialEq for NovikovElement {
    /// Structural equality of terms and precision.
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.precision == other.precision
    }
}

impl Default for NovikovElement {
    fn default() -> Self {
        NovikovElement::zero()
    }
}

impl<'a> Add<&'a NovikovElement> for &'a NovikovElement {
    type Output = NovikovElement;
    fn add(self, rhs: &NovikovElement) -> NovikovElement {
        let precision = self.precision.clone().min(rhs.precision.clone());
        if rhs.terms.is_empty() {
            return self.truncate(&precision);
        }
        if self.terms.is_empty() {
            return rhs.truncate(&precision);
        }
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            let ord = match (self.terms.get(i), rhs.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (e, c) = match ord {
                Ordering::Less => {
                    i += 1;
                    self.terms[i - 1].clone()
                }
                Ordering::Greater => {
                    j += 1;
                    rhs.terms[j - 1].clone()
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (self.terms[i - 1].0.clone(), &self.terms[i - 1].1 + &rhs.terms[j - 1].1)
                }
            };
            if let Valuation::Finite(p) = &precision {
                if &e >= p {
                    break;
                }
            }
            if !c.is_zero() {
                out.push((e, c));
            }
        }
        NovikovElement { terms: out, precision }
    }
}

impl Neg for &NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        NovikovElement {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            precision: self.precision.clone(),
        }
    }
}

impl Neg for NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        -&self
    }
}

impl<'a> Sub<&'a NovikovElement> for &'a NovikovElement {
    type Output = NovikovElement;
    fn sub(self, rhs: &NovikovElement) -> NovikovElement {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a NovikovElement> for &'a NovikovElement {
    type Output = NovikovElement;
    fn mul(self, rhs: &NovikovElement) -> NovikovElement {
        let precision = self.mul_prec(rhs).precision;
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return NovikovElement::zero_mod(precision);
        }
        if rhs.terms.len() == 1 {
            let (e, c) = &rhs.terms[0];
            let terms = self
                .terms
                .iter()
                .map(|(x, k)| (x + e, k * c))
                .take_while(|(x, _)| precision.finite().is_none_or(|p| x < p))
                .collect();
            return NovikovElement { terms, precision };
        }
        let mut prods = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea + eb;
                if precision.finite().is_none_or(|p| &e < p) {
                    prods.push((e, ca * cb));
                }
            }
        }
        prods.sort_by(|a, b| a.0.cmp(&b.0));
        NovikovElement { terms: merge_sorted(prods, &precision), precision }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<NovikovElement> for NovikovElement {
            type Output = NovikovElement;
            fn $m(self, rhs: NovikovElement) -> NovikovElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a NovikovElement> for NovikovElement {
            type Output = NovikovElement;
            fn $m(self, rhs: &NovikovElement) -> NovikovElement {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for NovikovElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "T".to_string()
            } else if e.is_integer() && !e.is_negative() {
                format!("T^{e}")
            } else {
                format!("T^({e})")
            };
            match (mag.is_one(), mono.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{mono}")?,
                (false, true) => write!(f, "{mag}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let (Valuation::Finite(p), false) = (&self.precision, f.alternate()) {
            write!(f, " + O(T^({p}))")?;
        }
        Ok(())
    }
}

/// An element of the interval quotient `Λ_{[a,b)} = Λ_{≥a} / Λ_{≥b}`.
///
/// Older literature uses the same symbol for other objects; in this crate
/// it always denotes this quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct NovikovInterval {
    lower: Exponent,
    upper: Exponent,
    representative: NovikovElement,
}

impl NovikovInterval {
    /// Reduces `x` into `Λ_{[a,b)}`; fails when `val(x) < a`.
    pub fn new(lower: Exponent, upper: Exponent, x: &NovikovElement) -> Result<Self> {
        if x.val().lt_rat(&lower) {
            return Err(Error::Invalid(format!("valuation {} below interval start {lower}", x.val())));
        }
        let representative = x.truncate(&Valuation::Finite(upper.clone()));
        Ok(NovikovInterval { lower, upper, representative })
    }

    pub fn representative(&self) -> &NovikovElement {
        &self.representative
    }

    pub fn bounds(&self) -> (&Exponent, &Exponent) {
        (&self.lower, &self.upper)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.lower != other.lower || self.upper != other.upper {
            return Err(Error::Invalid("interval bounds differ".into()));
        }
        NovikovInterval::new(self.lower.clone(), self.upper.clone(), &(&self.representative + &other.representative))
    }

    /// Action of `Λ_{≥0}` on the interval quotient.
    pub fn scale(&self, c: &NovikovElement) -> Result<Self> {
        if c.val().lt_rat(&Rat::ZERO) {
            return Err(Error::Invalid("scalar outside the valuation ring".into()));
        }
        NovikovInterval::new(self.lower.clone(), self.upper.clone(), &(&self.representative * c))
    }

    pub fn is_zero(&self) -> bool {
        self.representative.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn cap() -> Valuation {
        Valuation::Finite(Rat::int(10))
    }

    #[test]
    fn adding_distinct_exponents_keeps_both_terms() {
        let a = NovikovElement::from_terms([(r(1, 2), Rat::ONE), (Rat::ZERO, Rat::int(2))], cap());
        assert_eq!(a.terms().len(), 2);
        assert_eq!(a.val(), Valuation::Finite(Rat::ZERO));
        let b = &NovikovElement::t_pow(r(1, 2)) + &NovikovElement::t_pow(r(1, 3));
        assert_eq!(b.val(), Valuation::Finite(r(1, 3)));
    }

    #[test]
    fn inverse_of_monomial_is_exact() {
        let a = NovikovElement::monomial(Rat::int(2), Rat::int(3));
        let inv = a.inverse(&cap()).unwrap();
        assert_eq!(inv, NovikovElement::monomial(r(1, 2), Rat::int(-3)));
    }

    #[test]
    fn inverse_of_one_minus_t() {
        let a = &NovikovElement::one() - &NovikovElement::t_pow(Rat::ONE);
        let inv = a.inverse(&cap()).unwrap();
        let expected = NovikovElement::from_terms((0..10).map(|k| (Rat::int(k), Rat::ONE)), cap());
        assert_eq!(inv, expected);
    }

    #[test]
    fn zero_inversion_fails() {
        assert_eq!(NovikovElement::zero().inverse(&cap()), Err(Error::ZeroInversion));
    }

    #[test]
    fn precision_grows_with_valuation_in_products() {
        let a = NovikovElement::t_pow(Rat::int(2)).truncate(&cap());
        let b = NovikovElement::one().truncate(&cap());
        assert_eq!(*(&a * &b).precision(), cap());
        let c = NovikovElement::t_pow(Rat::ONE).truncate(&cap());
        assert_eq!(*(&a * &c).precision(), Valuation::Finite(Rat::int(11)));
    }

    #[test]
    fn display_is_readable() {
        let a = NovikovElement::from_terms([(r(1, 2), r(-3, 2)), (Rat::ZERO, Rat::ONE), (Rat::ONE, Rat::ONE)], Valuation::Infinite);
        assert_eq!(a.to_string(), "1 - 3/2*T^(1/2) + T");
    }

    #[test]
    fn interval_quotient_drops_high_terms() {
        let x = &NovikovElement::t_pow(r(1, 2)) + &NovikovElement::t_pow(Rat::int(2));
        let q = NovikovInterval::new(Rat::ZERO, Rat::ONE, &x).unwrap();
        assert_eq!(q.representative().terms().len(), 1);
        assert!(NovikovInterval::new(Rat::ONE, Rat::int(2), &x).is_err());
    }
}

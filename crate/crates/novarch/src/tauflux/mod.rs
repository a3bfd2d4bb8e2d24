//! Relative classes, flux polytopes, the cone `C(P)` and its group ring,
//! τ as a piecewise linear concave function, and dual cones of star shapes.
//!
//! A relative class `α ∈ Z^m` defines the affine function
//! `ℓ_v(α) = w0·α + ⟨v, ∂α⟩` of a flux vector `v ∈ Q^k`.

pub mod cone;
pub mod lp;

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;
use crate::spectral::{tau_from_ss, SpectralSequenceState};
use crate::linalg::{rank, NovMatrix};

pub use cone::ConeGenerators;

/// `w0` pairs a class with the relative symplectic class; `boundary` is
/// the `k × m` integer matrix of `∂ : Z^m → Z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelLattice {
    pub w0: Vec<Rat>,
    pub boundary: Vec<Vec<i64>>,
    k: usize,
}

impl RelLattice {
    pub fn new(w0: Vec<Rat>, k: usize, boundary: Vec<Vec<i64>>) -> Result<Self> {
        let m = w0.len();
        if boundary.len() != k || boundary.iter().any(|row| row.len() != m) {
            return Err(Error::DimensionMismatch(format!("boundary must be {k} × {m}")));
        }
        Ok(RelLattice { w0, boundary, k })
    }

    pub fn rank(&self) -> usize {
        self.w0.len()
    }

    pub fn boundary_rank(&self) -> usize {
        self.k
    }

    fn check_class(&self, alpha: &[i64]) -> Result<()> {
        if alpha.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!("class has {} entries, lattice rank is {}", alpha.len(), self.rank())));
        }
        Ok(())
    }

    pub fn pairing(&self, alpha: &[i64]) -> Rat {
        self.w0.iter().zip(alpha).fold(Rat::ZERO, |s, (w, &a)| &s + &(w * &Rat::int(a)))
    }

    pub fn boundary_of(&self, alpha: &[i64]) -> Vec<i64> {
        self.boundary.iter().map(|row| row.iter().zip(alpha).map(|(b, a)| b * a).sum()).collect()
    }

    /// `ℓ_v(α)`.
    pub fn evaluate(&self, alpha: &[i64], v: &[Rat]) -> Rat {
        let d = self.boundary_of(alpha);
        let flux = v.iter().zip(&d).fold(Rat::ZERO, |s, (x, &b)| &s + &(x * &Rat::int(b)));
        &self.pairing(alpha) + &flux
    }

    /// Coefficients of `β ↦ ℓ_v(β)` on `Q^m`.
    fn functional(&self, v: &[Rat], with_w0: bool) -> Vec<Rat> {
        (0..self.rank())
            .map(|j| {
                let flux = (0..self.k).fold(Rat::ZERO, |s, i| &s + &(&v[i] * &Rat::int(self.boundary[i][j])));
                if with_w0 {
                    &self.w0[j] + &flux
                } else {
                    flux
                }
            })
            .collect()
    }
}

fn dim_check(v: &[Rat], k: usize) -> Result<()> {
    if v.len() != k {
        return Err(Error::DimensionMismatch(format!("point has {} coordinates, expected {k}", v.len())));
    }
    Ok(())
}

/// A convex polytope in `Q^k`, stored by its irredundant vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxPolytope {
    pub vertices: Vec<Vec<Rat>>,
    pub contains_origin: bool,
}

impl FluxPolytope {
    /// Points in the hull of the others are discarded.
    pub fn new(points: Vec<Vec<Rat>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Invalid("a polytope needs at least one vertex".into()));
        };
        let k = first.len();
        if points.iter().any(|p| p.len() != k) {
            return Err(Error::DimensionMismatch("vertices of different dimensions".into()));
        }
        let mut vertices: Vec<Vec<Rat>> = Vec::new();
        for p in points {
            if !vertices.contains(&p) {
                vertices.push(p);
            }
        }
        let mut i = 0;
        while i < vertices.len() && vertices.len() > 1 {
            let others: Vec<Vec<Rat>> = vertices.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.clone()).collect();
            if lp::convex_combination(&others, &vertices[i]).is_some() {
                vertices.remove(i);
            } else {
                i += 1;
            }
        }
        let contains_origin = lp::convex_combination(&vertices, &vec![Rat::ZERO; k]).is_some();
        Ok(FluxPolytope { vertices, contains_origin })
    }

    /// The interval `[a, b]` in `Q^1`.
    pub fn interval(a: Rat, b: Rat) -> Result<Self> {
        FluxPolytope::new(vec![vec![a], vec![b]])
    }

    pub fn dimension(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        v.len() == self.dimension() && lp::convex_combination(&self.vertices, v).is_some()
    }
}

/// `α ∈ C(P)`: `ℓ_v(α) ≥ 0` at every vertex, hence on all of `P`.
pub fn cone_membership(alpha: &[i64], p: &FluxPolytope, l: &RelLattice) -> bool {
    alpha.len() == l.rank() && p.dimension() == l.boundary_rank() && p.vertices.iter().all(|v| !l.evaluate(alpha, v).is_negative())
}

/// A finite sum `Σ c_u e^{[u]}` in the group ring of `C(P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeRingElement {
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl ConeRingElement {
    pub fn new(terms: impl IntoIterator<Item = (Vec<i64>, Rat)>, p: &FluxPolytope, l: &RelLattice) -> Result<Self> {
        let mut out: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
        for (index, (u, c)) in terms.into_iter().enumerate() {
            l.check_class(&u)?;
            if !cone_membership(&u, p, l) {
                return Err(Error::ClassOutsideCone { index });
            }
            let e = out.entry(u).or_insert(Rat::ZERO);
            *e = &*e + &c;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(ConeRingElement { terms: out })
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Rat> {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (u, c) in &other.terms {
            let e = terms.entry(u.clone()).or_insert(Rat::ZERO);
            *e = &*e + c;
        }
        terms.retain(|_, c| !c.is_zero());
        ConeRingElement { terms }
    }

    /// `e^{[u]} · e^{[u']} = e^{[u+u']}`; `C(P)` is closed under addition.
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
        for (u, c) in &self.terms {
            for (w, e) in &other.terms {
                let sum: Vec<i64> = u.iter().zip(w).map(|(a, b)| a + b).collect();
                let t = terms.entry(sum).or_insert(Rat::ZERO);
                *t = &*t + &(c * e);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        ConeRingElement { terms }
    }
}

/// `sp_v(e^{[u]}) = T^{ℓ_v(u)}`.
pub fn specialize(x: &ConeRingElement, v: &[Rat], p: &FluxPolytope, l: &RelLattice) -> Result<NovikovElement> {
    dim_check(v, l.boundary_rank())?;
    if !p.contains(v) {
        return Err(Error::PointOutsidePolytope);
    }
    Ok(NovikovElement::from_terms(x.terms.iter().map(|(u, c)| (l.evaluate(u, v), c.clone())), Valuation::Infinite))
}

/// `v ↦ c + ⟨gradient, v⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPiece {
    pub constant: Rat,
    pub gradient: Vec<Rat>,
}

impl LinearPiece {
    pub fn eval(&self, v: &[Rat]) -> Rat {
        v.iter().zip(&self.gradient).fold(self.constant.clone(), |s, (x, g)| &s + &(x * g))
    }
}

/// Minimum of linear pieces on a polytope; no pieces means `+∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct PLConcaveFunction {
    pub pieces: Vec<LinearPiece>,
    pub domain: FluxPolytope,
}

impl PLConcaveFunction {
    pub fn eval(&self, v: &[Rat]) -> Result<Valuation> {
        dim_check(v, self.domain.dimension())?;
        if !self.domain.contains(v) {
            return Err(Error::PointOutsidePolytope);
        }
        Ok(self.eval_unchecked(v))
    }

    fn eval_unchecked(&self, v: &[Rat]) -> Valuation {
        self.pieces.iter().map(|p| Valuation::Finite(p.eval(v))).min().unwrap_or(Valuation::Infinite)
    }

    /// Indices of the pieces attaining the minimum at `v`.
    pub fn argmin(&self, v: &[Rat]) -> Vec<usize> {
        let best = self.eval_unchecked(v);
        (0..self.pieces.len()).filter(|&i| Valuation::Finite(self.pieces[i].eval(v)) == best).collect()
    }

    /// `τ((a+b)/2) ≥ (τ(a)+τ(b))/2`, exactly.
    pub fn midpoint_inequality(&self, a: &[Rat], b: &[Rat]) -> Result<bool> {
        let half = Rat::new(1, 2);
        let mid: Vec<Rat> = a.iter().zip(b).map(|(x, y)| &(x + y) * &half).collect();
        let (ta, tb, tm) = (self.eval(a)?, self.eval(b)?, self.eval(&mid)?);
        Ok(match (ta, tb, tm) {
            (Valuation::Finite(x), Valuation::Finite(y), Valuation::Finite(z)) => z >= &(&x + &y) * &half,
            (_, _, Valuation::Infinite) => true,
            _ => false,
        })
    }

    /// Strict midpoint inequality: a kink lies between `a` and `b`.
    pub fn strictly_concave_between(&self, a: &[Rat], b: &[Rat]) -> Result<bool> {
        let half = Rat::new(1, 2);
        let mid: Vec<Rat> = a.iter().zip(b).map(|(x, y)| &(x + y) * &half).collect();
        Ok(match (self.eval(a)?, self.eval(b)?, self.eval(&mid)?) {
            (Valuation::Finite(x), Valuation::Finite(y), Valuation::Finite(z)) => z > &(&x + &y) * &half,
            _ => false,
        })
    }
}

/// `τ(v) = min_α ℓ_v(α)` over classes of `C(P)`.
pub fn tau_eval(classes: &[Vec<i64>], p: &FluxPolytope, l: &RelLattice) -> Result<PLConcaveFunction> {
    if p.dimension() != l.boundary_rank() {
        return Err(Error::DimensionMismatch("polytope and boundary lattice differ in dimension".into()));
    }
    let mut pieces = Vec::with_capacity(classes.len());
    for (index, alpha) in classes.iter().enumerate() {
        l.check_class(alpha)?;
        if !cone_membership(alpha, p, l) {
            return Err(Error::ClassOutsideCone { index });
        }
        pieces.push(LinearPiece { constant: l.pairing(alpha), gradient: l.boundary_of(alpha).into_iter().map(Rat::int).collect() });
    }
    Ok(PLConcaveFunction { pieces, domain: p.clone() })
}

/// A finitely presented star shape: points `v`, rays `{tρ : t ≥ 0}`, and
/// full lines `{tρ : t ∈ R}`. The origin is always a member.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StarShape {
    pub points: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
    pub full_lines: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualCone {
    pub generators: ConeGenerators,
    /// Rows `a` of the inequalities `a·β ≥ 0`.
    pub inequalities: Vec<Vec<Rat>>,
    pub boundary_vanishes: bool,
}

impl DualCone {
    pub fn contains(&self, beta: &[Rat]) -> bool {
        cone::satisfies(&self.inequalities, beta)
    }

    /// A nonnegative combination of the generators equal to `beta`.
    pub fn decompose(&self, beta: &[Rat]) -> Option<Vec<Rat>> {
        lp::conic_combination(&cone::generator_rats(&self.generators), beta)
    }
}

pub const MAX_DUAL_CONE_RANK: usize = 8;

/// `{β : w0·β + ⟨v, ∂β⟩ ≥ 0 for all v in the star}`. The origin gives
/// `w0·β ≥ 0`; together with it, a ray `ρ` is equivalent to `⟨ρ, ∂β⟩ ≥ 0`
/// and a full line to `⟨ρ, ∂β⟩ = 0`.
pub fn dual_cone(l: &RelLattice, star: &StarShape) -> Result<DualCone> {
    let m = l.rank();
    if m > MAX_DUAL_CONE_RANK {
        return Err(Error::DimensionTooLarge(m));
    }
    let k = l.boundary_rank();
    let mut inequalities = vec![l.w0.clone()];
    for v in &star.points {
        dim_check(v, k)?;
        inequalities.push(l.functional(v, true));
    }
    for rho in &star.rays {
        dim_check(rho, k)?;
        inequalities.push(l.functional(rho, false));
    }
    for rho in &star.full_lines {
        dim_check(rho, k)?;
        let f = l.functional(rho, false);
        inequalities.push(f.iter().map(|x| -x).collect());
        inequalities.push(f);
    }
    let generators = cone::double_description(m, &inequalities);
    let boundary_vanishes = generators.generators().iter().all(|g| {
        l.boundary.iter().all(|row| row.iter().zip(g).fold(BigInt::from(0), |s, (b, x)| s + BigInt::from(*b) * x) == BigInt::from(0))
    });
    Ok(DualCone { generators, inequalities, boundary_vanishes })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub tau_small: Valuation,
    pub tau_large: Valuation,
    pub holds: bool,
}

/// For `K₁ ⊂ K₂` with `restriction : E₁(K₂) → E₁(K₁)` injective, checks
/// `τ(K₁) ≤ τ(K₂)`.
///
/// This is the statement about spectral sequences only. When both first
/// nonzero differentials sit on the same page, no chain-level witness is
/// constructed or required.
pub fn check_monotonicity(small: &SpectralSequenceState, large: &SpectralSequenceState, restriction: &NovMatrix) -> Result<MonotonicityReport> {
    let dim = |s: &SpectralSequenceState| s.page(1).map_or(0, |p| p.classes.len());
    if restriction.rows() != dim(small) || restriction.cols() != dim(large) {
        return Err(Error::DimensionMismatch(format!(
            "restriction is {}×{}, pages have ranks {} and {}",
            restriction.rows(),
            restriction.cols(),
            dim(small),
            dim(large)
        )));
    }
    let r = rank(restriction);
    if r < restriction.cols() {
        return Err(Error::MapNotInjective { rank: r, cols: restriction.cols() });
    }
    let tau_small = tau_from_ss(small)?;
    let tau_large = tau_from_ss(large)?;
    Ok(MonotonicityReport { holds: tau_small <= tau_large, tau_small, tau_large })
}

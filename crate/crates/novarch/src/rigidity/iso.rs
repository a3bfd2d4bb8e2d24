use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

use super::model::{AffElement, AffinoidModel, AnnulusFactor, Monomial};
use super::star::{ProductPerturbation, StarProduct};

/// Valuation of the residual after each iteration step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverTrace {
    pub defects: Vec<Valuation>,
    /// Lower bound on the valuation gained per step.
    pub predicted_gain: Rat,
}

impl SolverTrace {
    pub fn steps(&self) -> usize {
        self.defects.len()
    }

    /// Each finite defect exceeds the previous one by at least the predicted gain.
    pub fn contracts(&self) -> bool {
        self.defects.windows(2).all(|w| match (&w[0], &w[1]) {
            (_, Valuation::Infinite) => true,
            (Valuation::Finite(a), Valuation::Finite(b)) => b > a && &(b - a) >= &self.predicted_gain,
            (Valuation::Infinite, Valuation::Finite(_)) => false,
        })
    }
}

/// `w₂` with `z₁' * w₂ = T^s·1_*` for one annulus factor.
#[derive(Clone, Debug)]
pub struct AnnulusSolution {
    pub factor: usize,
    pub z1: AffElement,
    pub w2: AffElement,
    pub trace: SolverTrace,
}

/// A basis map `φ` from the reference algebra to the perturbed one.
#[derive(Clone, Debug)]
pub struct RigidityIso {
    pub model: AffinoidModel,
    /// Unit of the perturbed product.
    pub unit: AffElement,
    pub unit_trace: SolverTrace,
    pub annuli: Vec<AnnulusSolution>,
    /// Images of every window monomial, so that products of basis
    /// elements past the truncation stay defined.
    pub images: BTreeMap<Monomial, AffElement>,
    pub report: IsoReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsoReport {
    pub pairs_checked: usize,
    /// `φ(ab) = φ(a)*φ(b)` mod `T^E` on every basis pair.
    pub multiplicative: bool,
    /// `min val(φ(e) − e)` over basis elements.
    pub distance: Valuation,
    /// `|φ(e)| = |e|` for every basis element.
    pub isometric: bool,
    /// Guaranteed lower bound on `val(φ − id)`: `γ` on a Tate algebra,
    /// `γ − max s` once a `T^{−s}` correction is involved.
    pub distance_bound: Rat,
    /// `val(φ − id)` exceeds `distance_bound`.
    pub close: bool,
    /// Every solver trace contracts by its predicted factor.
    pub contracting: bool,
}

impl RigidityIso {
    pub fn holds(&self) -> bool {
        let r = &self.report;
        r.multiplicative && r.isometric && r.close && r.contracting
    }

    pub fn image(&self, m: &[i64]) -> Option<&AffElement> {
        self.images.get(m)
    }
}

fn require_close(gamma: &Rat, bound: &Rat) -> Result<()> {
    if gamma > bound {
        Ok(())
    } else {
        Err(Error::NotClose(format!("closeness exponent {gamma} must exceed {bound}")))
    }
}

fn step_cap(precision: &Rat, gain: &Rat) -> usize {
    let q = (precision / gain).ceil();
    usize::try_from(q).unwrap_or(0) + 3
}

/// Fixed point of `v ↦ v + T^{−s}(target − z * (pre·v))` at the working
/// precision of `model`.
#[allow(clippy::too_many_arguments)]
fn iterate(
    model: &AffinoidModel,
    star: &dyn StarProduct,
    z: &AffElement,
    pre: &AffElement,
    target: &AffElement,
    start: AffElement,
    s: &Rat,
    gain: &Rat,
) -> Result<(AffElement, SolverTrace)> {
    let cap = step_cap(&model.precision, gain);
    let neg_s = -s;
    let mut v = start;
    let mut trace = SolverTrace { defects: Vec::new(), predicted_gain: gain.clone() };
    for _ in 0..cap {
        let w = model.mul(pre, &v);
        let residual = model.normalize(&target.sub(&star.product(model, z, &w)));
        let dv = model.val_mod(&residual, &model.precision).minus(s);
        trace.defects.push(dv);
        if residual.is_zero() {
            return Ok((v, trace));
        }
        v = model.normalize(&v.add(&residual.shift(&neg_s)));
    }
    Err(Error::IterationStalled { steps: cap })
}

/// The perturbed unit, solving `u * 1 = 1`.
fn solve_unit(model: &AffinoidModel, star: &dyn StarProduct, gamma: &Rat) -> Result<(AffElement, SolverTrace)> {
    let one = model.one();
    iterate(model, star, &one, &one, &one, one.clone(), &Rat::ZERO, gamma)
}

fn solve_annulus(
    model: &AffinoidModel,
    star: &dyn StarProduct,
    unit: &AffElement,
    factor: usize,
    z1: AffElement,
    gain: &Rat,
) -> Result<AnnulusSolution> {
    let s = model.annuli[factor].width();
    let z2 = model.annulus_var(factor, -1);
    let target = unit.shift(&s);
    let (v, trace) = iterate(model, star, &z1, &z2, &target, unit.clone(), &s, gain)?;
    let w2 = model.mul(&z2, &v);
    Ok(AnnulusSolution { factor, z1, w2, trace })
}

fn star_power(model: &AffinoidModel, star: &dyn StarProduct, unit: &AffElement, x: &AffElement, n: u64) -> AffElement {
    let mut acc: Option<AffElement> = None;
    for _ in 0..n {
        acc = Some(match acc {
            None => x.clone(),
            Some(a) => star.product(model, &a, x),
        });
    }
    acc.unwrap_or_else(|| unit.clone())
}

/// Shared driver: generators map to `gens` (Tate vars), `annuli[j].z1` and
/// `annuli[j].w2`; every basis monomial maps to the star product of powers.
#[allow(clippy::too_many_arguments)]
fn assemble(
    work: &AffinoidModel,
    target: &AffinoidModel,
    pert: &ProductPerturbation,
    unit: AffElement,
    unit_trace: SolverTrace,
    tate_images: Vec<AffElement>,
    annuli: Vec<AnnulusSolution>,
    distance_bound: Rat,
) -> RigidityIso {
    let star = pert.star.as_ref();
    let n = target.truncation as u64;
    let reach = target.window_reach();
    let mut powers: Vec<BTreeMap<i64, AffElement>> = Vec::new();
    for x in &tate_images {
        powers.push((0..=n as i64).map(|k| (k, star_power(work, star, &unit, x, k as u64))).collect());
    }
    for a in &annuli {
        let mut table = BTreeMap::new();
        for k in -reach..=reach {
            let base = if k >= 0 { &a.z1 } else { &a.w2 };
            table.insert(k, star_power(work, star, &unit, base, k.unsigned_abs()));
        }
        powers.push(table);
    }
    let mut images = BTreeMap::new();
    for m in target.window() {
        let mut acc: Option<AffElement> = None;
        for (slot, &k) in m.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let p = &powers[slot][&k];
            acc = Some(match acc {
                None => p.clone(),
                Some(a) => star.product(work, &a, p),
            });
        }
        images.insert(m, acc.unwrap_or_else(|| unit.clone()));
    }
    let report = check_iso(work, target, pert, &images, &unit_trace, &annuli, distance_bound);
    RigidityIso { model: target.clone(), unit, unit_trace, annuli, images, report }
}

fn apply(target: &AffinoidModel, images: &BTreeMap<Monomial, AffElement>, x: &AffElement) -> Option<AffElement> {
    let mut acc = AffElement::default();
    for (m, c) in &x.terms {
        acc = acc.add(&images.get(m)?.scale(c));
    }
    Some(target.normalize(&acc))
}

fn check_iso(
    work: &AffinoidModel,
    target: &AffinoidModel,
    pert: &ProductPerturbation,
    images: &BTreeMap<Monomial, AffElement>,
    unit_trace: &SolverTrace,
    annuli: &[AnnulusSolution],
    distance_bound: Rat,
) -> IsoReport {
    let e = &target.precision;
    let star = pert.star.as_ref();
    let basis = target.basis();
    let mut pairs = 0;
    let mut multiplicative = true;
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i..] {
            let ab = target.mul(&target.basis_element(a.clone()), &target.basis_element(b.clone()));
            let rhs = star.product(work, &images[a], &images[b]);
            pairs += 1;
            let Some(lhs) = apply(target, images, &ab) else {
                multiplicative = false;
                continue;
            };
            if !target.eq_mod(&lhs, &rhs, e) {
                multiplicative = false;
            }
        }
    }
    let mut distance = Valuation::Infinite;
    let mut isometric = true;
    for m in &basis {
        let img = &images[m];
        let d = target.val_mod(&img.sub(&target.basis_element(m.clone())), e);
        if d <= Valuation::Finite(Rat::ZERO) {
            isometric = false;
        }
        distance = distance.min(d);
    }
    let close = distance > Valuation::Finite(distance_bound.clone());
    let contracting = unit_trace.contracts() && annuli.iter().all(|a| a.trace.contracts());
    IsoReport { pairs_checked: pairs, multiplicative, distance, isometric, distance_bound, close, contracting }
}

/// `φ(x^I) = x^{*I}` on a truncated Tate algebra. Requires `c < 1`.
pub fn rigidity_iso_tate(model: &AffinoidModel, pert: &ProductPerturbation) -> Result<RigidityIso> {
    if !model.annuli.is_empty() {
        return Err(Error::Invalid("expected a Tate model".into()));
    }
    require_close(&pert.closeness, &Rat::ZERO)?;
    let star = pert.star.as_ref();
    let (unit, trace) = solve_unit(model, star, &pert.closeness)?;
    let gens = (0..model.tate_vars).map(|i| model.tate_var(i)).collect();
    Ok(assemble(model, model, pert, unit, trace, gens, Vec::new(), pert.closeness.clone()))
}

/// Annulus and polyannulus: per factor, `φ(z₁^k) = z₁^{*k}` and
/// `φ(z₂^k) = w₂^{*k}` with `z₁ * w₂ = T^{r₁+r₂}`. Requires
/// `c < e^{−max(r₁+r₂)}`.
pub fn rigidity_iso_polyannulus(model: &AffinoidModel, pert: &ProductPerturbation) -> Result<RigidityIso> {
    if model.annuli.is_empty() {
        return Err(Error::Invalid("expected at least one annulus factor".into()));
    }
    let s_max = model.annuli.iter().map(AnnulusFactor::width).max().expect("nonempty");
    require_close(&pert.closeness, &s_max)?;
    let work = model.with_precision(&model.precision + &s_max);
    let star = pert.star.as_ref();
    let (unit, unit_trace) = solve_unit(&work, star, &pert.closeness)?;
    let gain = &pert.closeness - &s_max;
    let annuli = (0..model.annuli.len())
        .map(|j| solve_annulus(&work, star, &unit, j, model.annulus_var(j, 1), &gain))
        .collect::<Result<Vec<_>>>()?;
    let gens = (0..model.tate_vars).map(|i| model.tate_var(i)).collect();
    Ok(assemble(&work, model, pert, unit, unit_trace, gens, annuli, gain))
}

pub fn rigidity_iso_annulus(model: &AffinoidModel, pert: &ProductPerturbation) -> Result<RigidityIso> {
    if model.annuli.len() != 1 || model.tate_vars != 0 {
        return Err(Error::Invalid("expected a single annulus".into()));
    }
    rigidity_iso_polyannulus(model, pert)
}

/// `{|x| ≤ 1, |f| ≥ e^{−r}}` in the unit ball of dimension `n`, for
/// `f = λ + x₁` with `val(λ) ≥ 0`. In the coordinate `w = f` this is the
/// annulus `e^{−r} ≤ |w| ≤ 1` times the ball in `x₂, …, x_n`; the model
/// orders the Tate variables `x₂, …, x_n` first, then `(w, u = T^r/w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentDomain {
    pub dim: usize,
    pub lambda: NovikovElement,
    pub r: Rat,
    pub model: AffinoidModel,
}

impl LaurentDomain {
    pub fn new(dim: usize, lambda: NovikovElement, r: Rat, truncation: usize, precision: Rat) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("a Laurent domain needs at least one variable".into()));
        }
        if lambda.val() < Valuation::Finite(Rat::ZERO) {
            return Err(Error::Invalid("f must have norm at most one on the ball".into()));
        }
        let model = AffinoidModel {
            tate_vars: dim - 1,
            annuli: vec![AnnulusFactor { r1: Rat::ZERO, r2: r.clone() }],
            truncation,
            precision,
        };
        model.validate()?;
        Ok(LaurentDomain { dim, lambda, r, model })
    }

    /// `f = w`.
    pub fn f(&self) -> AffElement {
        self.model.annulus_var(0, 1)
    }

    /// `x₁ = w − λ`.
    pub fn x1(&self) -> AffElement {
        self.f().sub(&self.model.one().scale(&self.lambda))
    }

    /// `x_i` for `i ≥ 2` (1-based).
    pub fn x(&self, i: usize) -> AffElement {
        if i == 1 {
            self.x1()
        } else {
            self.model.tate_var(i - 2)
        }
    }
}

/// Solves `u * f_* = T^r·1_*` with `f_* = x₁ + λ·1_*` and maps
/// `x^I u^j ↦ x^{*I} * u^{*j}`. Requires `c < e^{−r}`.
pub fn rigidity_iso_laurent(domain: &LaurentDomain, pert: &ProductPerturbation) -> Result<RigidityIso> {
    let model = &domain.model;
    let s = &domain.r;
    require_close(&pert.closeness, s)?;
    let work = model.with_precision(&model.precision + s);
    let star = pert.star.as_ref();
    let (unit, unit_trace) = solve_unit(&work, star, &pert.closeness)?;
    let f_star = work.normalize(&domain.x1().add(&unit.scale(&domain.lambda)));
    let gain = &pert.closeness - s;
    let sol = solve_annulus(&work, star, &unit, 0, f_star, &gain)?;
    let gens = (0..model.tate_vars).map(|i| model.tate_var(i)).collect();
    Ok(assemble(&work, model, pert, unit, unit_trace, gens, vec![sol], gain))
}

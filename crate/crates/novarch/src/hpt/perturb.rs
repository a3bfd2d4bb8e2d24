use crate::complexes::{homology_barcode, ValuedComplex, Weighting};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm_val, orthogonal_basis, NovMatrix, ValuedBasis};
use crate::novikov::Valuation;
use crate::rational::Rat;

use super::sdr::SpecialRetraction;

/// Retraction of `(G, d₀ + δ)` onto `(H, d_def)`.
#[derive(Clone, Debug)]
pub struct PerturbedRetraction {
    pub homology: ValuedBasis,
    pub deformed_differential: NovMatrix,
    pub include: NovMatrix,
    pub project: NovMatrix,
    pub homotopy: NovMatrix,
    /// `S = Σ_{n≥0} (−δh)^n δ`.
    pub series: NovMatrix,
    pub series_terms: usize,
    pub delta_val: Valuation,
    pub beta: Rat,
    pub epsilon: Rat,
}

/// `min(1/100, (val δ − β)/7)`, so that `6ε + β < val δ`.
pub fn default_epsilon(delta_val: &Valuation, beta: &Rat) -> Rat {
    let hundredth = Rat::new(1, 100);
    match delta_val {
        Valuation::Finite(v) => hundredth.min(&(v - beta) / &Rat::int(7)),
        Valuation::Infinite => hundredth,
    }
}

/// The perturbation lemma: with `|δ| < e^{−β}` the series `S` converges.
/// The retraction satisfies `id − ip = dh + hd`, so the lemma is applied to
/// the homotopy `−h`: `S = Σ (−δh)^n δ`, `d_def = pSi`, `i₁ = i − hSi`,
/// `p₁ = p − pSh`, `h₁ = h − hSh`.
pub fn perturb(g: &ValuedComplex, r: &SpecialRetraction, delta: &NovMatrix, epsilon: Option<Rat>) -> Result<PerturbedRetraction> {
    let n = g.len();
    if delta.rows() != n || delta.cols() != n {
        return Err(Error::DimensionMismatch("perturbation shape differs from the complex".into()));
    }
    let w = &g.basis.weights;
    let delta_val = operator_norm_val(delta, w, w);
    if delta_val <= Valuation::Finite(r.beta.clone()) {
        return Err(Error::PerturbationTooLarge { delta: delta_val, beta: r.beta.clone() });
    }
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(&delta_val, &r.beta));
    let cap = g.cap();
    let delta = delta.truncate(&cap);
    let dh = delta.mul(&r.homotopy).neg();
    let mut series = delta.clone();
    let mut term = delta.clone();
    let mut series_terms = 1;
    if let Valuation::Finite(dv) = &delta_val {
        let gap = dv - &r.beta;
        let spread = match (w.iter().max(), w.iter().min()) {
            (Some(a), Some(b)) => a - b,
            _ => Rat::ZERO,
        };
        let bound = (&(&(&g.precision + &spread) - dv) / &gap).ceil();
        let limit = usize::try_from(bound).unwrap_or(0) + 3;
        loop {
            term = dh.mul(&term);
            if term.is_zero() {
                break;
            }
            series_terms += 1;
            if series_terms > limit {
                return Err(Error::SeriesDiverged { terms: series_terms });
            }
            series = series.add(&term);
        }
    }
    let (i, p, h) = (&r.include, &r.project, &r.homotopy);
    let si = series.mul(i);
    Ok(PerturbedRetraction {
        homology: r.homology.clone(),
        deformed_differential: p.mul(&si),
        include: i.sub(&h.mul(&si)),
        project: p.sub(&p.mul(&series).mul(h)),
        homotopy: h.sub(&h.mul(&series).mul(h)),
        series,
        series_terms,
        delta_val,
        beta: r.beta.clone(),
        epsilon,
    })
}

/// `sup` of the norm valuation over representatives of the class of the
/// cycle `x` (given in `c`'s coordinates).
pub fn homology_class_val(c: &ValuedComplex, x: &[crate::novikov::NovikovElement]) -> Valuation {
    let cols = (0..c.len()).map(|j| c.d.column(j)).collect();
    orthogonal_basis(cols, &c.basis.weights, None, &c.cap()).quotient_val(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedCheck {
    pub deformed_square_zero: bool,
    pub project_include_identity: bool,
    pub homotopy_squared_zero: bool,
    pub homotopy_include_zero: bool,
    pub project_homotopy_zero: bool,
    pub homotopy_formula: bool,
    pub include_chain_map: bool,
    pub project_chain_map: bool,
    /// `val_E(d_def) ≥ 0`.
    pub deformed_in_lattice: bool,
    /// `val_E(d_def) ≥ ħ`.
    pub deformed_above_hbar: bool,
    /// `|i₁|, |p₁| ≤ e^ε`, `|h₁| ≤ e^{β+ε}` and `6ε + β < val δ`.
    pub epsilon_bounds: bool,
    /// Class norms agree under `p₁` on the homology basis of `(G, d)`.
    pub isometry: bool,
    /// Lattice barcodes of `(G, d)` and `(H, d_def)` coincide.
    pub barcodes_agree: bool,
}

impl PerturbedCheck {
    pub fn all(&self) -> bool {
        self.deformed_square_zero
            && self.project_include_identity
            && self.homotopy_squared_zero
            && self.homotopy_include_zero
            && self.project_homotopy_zero
            && self.homotopy_formula
            && self.include_chain_map
            && self.project_chain_map
            && self.deformed_in_lattice
            && self.deformed_above_hbar
            && self.epsilon_bounds
            && self.isometry
            && self.barcodes_agree
    }
}

/// Verifies a perturbed retraction against `v = (G, d₀ + δ)`.
pub fn check_perturbed(v: &ValuedComplex, pr: &PerturbedRetraction, hbar: &Rat, slack: &Rat) -> Result<PerturbedCheck> {
    let cap = v.cap();
    let n = v.len();
    let hn = pr.homology.len();
    let (dd, i, p, h, d) = (&pr.deformed_differential, &pr.include, &pr.project, &pr.homotopy, &v.d);
    let id_n = NovMatrix::identity(n, cap.clone());
    let id_h = NovMatrix::identity(hn, cap.clone());
    let w = &v.basis.weights;
    let hw = &pr.homology.weights;
    let eps = Valuation::Finite(-&pr.epsilon);
    let epsilon_bounds = operator_norm_val(i, hw, w) >= eps
        && operator_norm_val(p, w, hw) >= eps
        && operator_norm_val(h, w, w) >= Valuation::Finite(-(&pr.beta + &pr.epsilon))
        && Valuation::Finite(&(&Rat::int(6) * &pr.epsilon) + &pr.beta) < pr.delta_val;
    let target = ValuedComplex::new(pr.homology.clone(), v.grading, dd.clone(), v.precision.clone())?;
    let retraction = super::special_dr(v, &pr.epsilon)?;
    let mut isometry = true;
    for c in &retraction.representatives {
        let image = p.apply(c);
        if homology_class_val(v, c) != homology_class_val(&target, &image) {
            isometry = false;
        }
    }
    let barcodes_agree =
        homology_barcode(v, Weighting::Relative, slack)? == homology_barcode(&target, Weighting::Relative, slack)?;
    let min_val = dd.min_val();
    Ok(PerturbedCheck {
        deformed_square_zero: dd.mul(dd).is_zero(),
        project_include_identity: p.mul(i).eq_mod(&id_h),
        homotopy_squared_zero: h.mul(h).is_zero(),
        homotopy_include_zero: h.mul(i).is_zero(),
        project_homotopy_zero: p.mul(h).is_zero(),
        homotopy_formula: id_n.sub(&i.mul(p)).eq_mod(&d.mul(h).add(&h.mul(d))),
        include_chain_map: d.mul(i).eq_mod(&i.mul(dd)),
        project_chain_map: p.mul(d).eq_mod(&dd.mul(p)),
        deformed_in_lattice: min_val >= Valuation::Finite(Rat::ZERO),
        deformed_above_hbar: min_val >= Valuation::Finite(hbar.clone()),
        epsilon_bounds,
        isometry,
        barcodes_agree,
    })
}


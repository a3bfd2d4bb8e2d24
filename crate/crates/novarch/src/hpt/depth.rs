//! At finite rank every differential has closed image, so finite boundary
//! depth carries no separate closedness statement; the infinite-rank
//! closedness lemma is not modelled.

use crate::complexes::{homology_barcode, ValuedComplex, Weighting};
use crate::error::{Error, Result};
use crate::linalg::{orthogonal_basis, unit_vector, weighted_val};
use crate::novikov::Valuation;
use crate::rational::Rat;

/// Boundary depth from the torsion barcode: the largest torsion exponent
/// under the norm weights, zero when there is no torsion.
pub fn boundary_depth_torsion(c: &ValuedComplex, slack: &Rat) -> Result<Rat> {
    Ok(homology_barcode(c, Weighting::Norm, slack)?.max_torsion().unwrap_or(Rat::ZERO))
}

/// Boundary depth from its definition, `e^β = |d̄⁻¹|_∞` with
/// `d̄ : C/ker d → im d`, computed without Smith normal form. The image is
/// reduced to an orthogonal basis `b_i` while tracking preimages `y_i`; then
/// `β = max_i val(b_i) − val([y_i] ∈ C/ker d)`.
pub fn boundary_depth_def(c: &ValuedComplex, slack: &Rat) -> Result<Rat> {
    if !c.square_vanishes() {
        return Err(Error::NotAComplex("d^2 does not vanish modulo T^E".into()));
    }
    let cap = c.cap();
    let mut beta = Rat::ZERO;
    for k in c.degrees() {
        let (src, tgt, block) = c.block(k);
        if src.is_empty() || tgt.is_empty() {
            continue;
        }
        let w_src: Vec<Rat> = src.iter().map(|&i| c.basis.weights[i].clone()).collect();
        let w_tgt: Vec<Rat> = tgt.iter().map(|&i| c.basis.weights[i].clone()).collect();
        let cols = (0..src.len()).map(|j| block.column(j)).collect();
        let comps = (0..src.len()).map(|j| unit_vector(src.len(), j)).collect();
        let image = orthogonal_basis(cols, &w_tgt, Some(comps), &cap);
        let kernel = orthogonal_basis(image.null_companions.clone(), &w_src, None, &cap);
        for (b, y) in image.vectors.iter().zip(&image.companions) {
            let (Valuation::Finite(vb), Valuation::Finite(vy)) = (weighted_val(b, &w_tgt), kernel.quotient_val(y)) else {
                return Err(Error::Inconclusive("image vector vanished modulo the precision".into()));
            };
            let gap = &vb - &vy;
            if gap > beta {
                beta = gap;
            }
        }
    }
    let threshold = &c.precision - slack;
    if beta >= threshold {
        return Err(Error::PrecisionExhausted { valuation: beta, precision: c.precision.clone() });
    }
    Ok(beta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DepthReport {
    pub beta: Rat,
    pub beta_torsion: Rat,
    pub beta_definition: Rat,
    pub methods_agree: bool,
}

/// Both routes; `beta` is the torsion value.
pub fn boundary_depth(c: &ValuedComplex, slack: &Rat) -> Result<DepthReport> {
    let t = boundary_depth_torsion(c, slack)?;
    let d = boundary_depth_def(c, slack)?;
    Ok(DepthReport { methods_agree: t == d, beta: t.clone(), beta_torsion: t, beta_definition: d })
}

use crate::complexes::ValuedComplex;
use crate::error::{Error, Result};
use crate::linalg::{is_zero_vector, operator_norm_val, orthogonal_basis, unit_vector, weighted_val, NovMatrix, NovVector, ReducedBasis, ValuedBasis};
use crate::novikov::Valuation;
use crate::rational::Rat;

/// Maps `i : H → G`, `p : G → H`, `h : G → G[−1]` with
/// `p i = id`, `id − i p = d h + h d`, `h² = h i = p h = 0`.
/// `H` carries zero differential and the orthogonal basis of homology
/// representatives, weighted by their norms.
#[derive(Clone, Debug)]
pub struct SpecialRetraction {
    pub homology: ValuedBasis,
    pub representatives: Vec<NovVector>,
    pub include: NovMatrix,
    pub project: NovMatrix,
    pub homotopy: NovMatrix,
    pub beta: Rat,
    pub epsilon: Rat,
}

struct DegreeData {
    idx: Vec<usize>,
    weights: Vec<Rat>,
    cycles: ReducedBasis,
    boundaries: Option<ReducedBasis>,
    homology: Option<ReducedBasis>,
}

/// Decomposes each degree as `D ⊕ B ⊕ C` with `Z = B ⊕ C = ker d`,
/// `B = d(D)`, all sums orthogonal: `Z` gets a reduced orthogonal basis,
/// `D` is spanned by the standard vectors off its pivots, `B` is the reduced
/// image of `D` with preimages tracked, and `C` is `Z` reduced modulo `B`.
/// Then `i` sends the homology basis to `C`, `p` takes `C`-coordinates and
/// `h = d|_D⁻¹ ∘ π_B`. This yields `|i|, |p| ≤ 1` and `|h| ≤ e^β`; `epsilon`
/// is the slack recorded for the perturbation bounds.
pub fn special_dr(g: &ValuedComplex, epsilon: &Rat) -> Result<SpecialRetraction> {
    if !g.square_vanishes() {
        return Err(Error::NotAComplex("d^2 does not vanish modulo T^E".into()));
    }
    let n = g.len();
    let cap = g.cap();
    let degrees = g.degrees();
    let mut data: Vec<DegreeData> = Vec::new();
    for &k in &degrees {
        let idx = g.basis.indices_in_degree(k);
        let weights: Vec<Rat> = idx.iter().map(|&i| g.basis.weights[i].clone()).collect();
        let (src, tgt, block) = g.block(k);
        let kernel_vectors = if tgt.is_empty() {
            (0..src.len()).map(|j| unit_vector(src.len(), j)).collect()
        } else {
            let w_tgt: Vec<Rat> = tgt.iter().map(|&i| g.basis.weights[i].clone()).collect();
            let cols = (0..src.len()).map(|j| block.column(j)).collect();
            let comps = (0..src.len()).map(|j| unit_vector(src.len(), j)).collect();
            orthogonal_basis(cols, &w_tgt, Some(comps), &cap).null_companions
        };
        let cycles = orthogonal_basis(kernel_vectors, &weights, None, &cap);
        data.push(DegreeData { idx, weights, cycles, boundaries: None, homology: None });
    }
    let pos = |k: i64| degrees.iter().position(|&x| x == k);
    let mut beta = Rat::ZERO;
    // Boundaries of degree target(k) come from the complement D_k.
    for (a, &k) in degrees.iter().enumerate() {
        let Some(b) = pos(g.grading.target(k)) else { continue };
        let (src, tgt, block) = g.block(k);
        let complement = data[a].cycles.complement_coordinates();
        let cols: Vec<NovVector> = complement.iter().map(|&q| block.column(q)).collect();
        let comps: Vec<NovVector> = complement.iter().map(|&q| unit_vector(src.len(), q)).collect();
        let tw = data[b].weights.clone();
        debug_assert_eq!(tgt.len(), tw.len());
        let red = orthogonal_basis(cols, &tw, Some(comps), &cap);
        if !red.null_companions.is_empty() {
            return Err(Error::Inconclusive("differential not injective on the cycle complement modulo the precision".into()));
        }
        for (bv, y) in red.vectors.iter().zip(&red.companions) {
            if let (Valuation::Finite(vb), Valuation::Finite(vy)) = (weighted_val(bv, &tw), weighted_val(y, &data[a].weights)) {
                let gap = &vb - &vy;
                if gap > beta {
                    beta = gap;
                }
            }
        }
        data[b].boundaries = Some(red);
    }
    for dd in data.iter_mut() {
        let mut reps = Vec::new();
        for z in &dd.cycles.vectors {
            let r = match &dd.boundaries {
                Some(b) => b.reduce(z).1,
                None => z.clone(),
            };
            if !is_zero_vector(&r) {
                reps.push(r);
            }
        }
        dd.homology = Some(orthogonal_basis(reps, &dd.weights, None, &cap));
    }
    // Global homology basis, ordered by degree.
    let mut names = Vec::new();
    let mut hdeg = Vec::new();
    let mut hw = Vec::new();
    let mut representatives = Vec::new();
    let mut offsets = Vec::new();
    for (a, dd) in data.iter().enumerate() {
        offsets.push(names.len());
        let h = dd.homology.as_ref().expect("set above");
        for (v, &q) in h.vectors.iter().zip(&h.pivots) {
            names.push(format!("[{}]", g.basis.names[dd.idx[q]]));
            hdeg.push(degrees[a]);
            hw.push(match weighted_val(v, &dd.weights) {
                Valuation::Finite(x) => x,
                Valuation::Infinite => unreachable!("nonzero representative"),
            });
            let mut full = vec![crate::novikov::NovikovElement::zero(); n];
            for (t, &i) in dd.idx.iter().enumerate() {
                full[i] = v[t].clone();
            }
            representatives.push(full);
        }
    }
    let hn = names.len();
    let include = NovMatrix::from_columns(n, &representatives, cap.clone());
    let mut project = NovMatrix::zeros(hn, n, cap.clone());
    let mut homotopy = NovMatrix::zeros(n, n, cap.clone());
    for (a, dd) in data.iter().enumerate() {
        let h = dd.homology.as_ref().expect("set above");
        let source_of_boundaries = degrees.iter().position(|&x| g.grading.target(x) == degrees[a]);
        for (t, &j) in dd.idx.iter().enumerate() {
            let e = unit_vector(dd.idx.len(), t);
            let z = {
                let (_, rem) = dd.cycles.reduce(&e);
                e.iter().zip(&rem).map(|(x, r)| x - r).collect::<NovVector>()
            };
            let c = match &dd.boundaries {
                Some(b) => {
                    let (coeffs, rem) = b.reduce(&z);
                    if let Some(s) = source_of_boundaries {
                        let src = &data[s];
                        let mut pre = vec![crate::novikov::NovikovElement::zero(); src.idx.len()];
                        for (cf, y) in coeffs.iter().zip(&b.companions) {
                            if !cf.is_zero() {
                                pre = crate::linalg::axpy(&pre, cf, y);
                            }
                        }
                        for (u, &i) in src.idx.iter().enumerate() {
                            homotopy.set(i, j, pre[u].clone());
                        }
                    }
                    rem
                }
                None => z,
            };
            let (coeffs, rem) = h.reduce(&c);
            if !is_zero_vector(&rem) {
                return Err(Error::Inconclusive("cycle decomposition lost precision".into()));
            }
            for (m, cf) in coeffs.into_iter().enumerate() {
                project.set(offsets[a] + m, j, cf);
            }
        }
    }
    Ok(SpecialRetraction {
        homology: ValuedBasis::new(names, hdeg, hw),
        representatives,
        include,
        project,
        homotopy,
        beta,
        epsilon: epsilon.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetractionCheck {
    pub project_include_identity: bool,
    pub homotopy_squared_zero: bool,
    pub homotopy_include_zero: bool,
    pub project_homotopy_zero: bool,
    pub homotopy_formula: bool,
    pub include_chain_map: bool,
    pub project_chain_map: bool,
    pub include_norm_val: Valuation,
    pub project_norm_val: Valuation,
    pub homotopy_norm_val: Valuation,
}

impl RetractionCheck {
    pub fn identities_hold(&self) -> bool {
        self.project_include_identity
            && self.homotopy_squared_zero
            && self.homotopy_include_zero
            && self.project_homotopy_zero
            && self.homotopy_formula
            && self.include_chain_map
            && self.project_chain_map
    }

    /// `|i|, |p| ≤ 1` and `|h| ≤ e^β`.
    pub fn norms_bounded(&self, beta: &Rat) -> bool {
        let zero = Valuation::Finite(Rat::ZERO);
        self.include_norm_val >= zero && self.project_norm_val >= zero && self.homotopy_norm_val >= Valuation::Finite(-beta)
    }
}

pub fn check_sdr(g: &ValuedComplex, r: &SpecialRetraction) -> RetractionCheck {
    let cap = g.cap();
    let n = g.len();
    let hn = r.homology.len();
    let (i, p, h, d) = (&r.include, &r.project, &r.homotopy, &g.d);
    let id_n = NovMatrix::identity(n, cap.clone());
    let id_h = NovMatrix::identity(hn, cap.clone());
    let w = &g.basis.weights;
    let hw = &r.homology.weights;
    RetractionCheck {
        project_include_identity: p.mul(i).eq_mod(&id_h),
        homotopy_squared_zero: h.mul(h).is_zero(),
        homotopy_include_zero: h.mul(i).is_zero(),
        project_homotopy_zero: p.mul(h).is_zero(),
        homotopy_formula: id_n.sub(&i.mul(p)).eq_mod(&d.mul(h).add(&h.mul(d))),
        include_chain_map: d.mul(i).is_zero(),
        project_chain_map: p.mul(d).is_zero(),
        include_norm_val: operator_norm_val(i, hw, w),
        project_norm_val: operator_norm_val(p, w, hw),
        homotopy_norm_val: operator_norm_val(h, w, w),
    }
}

use crate::error::{Error, Result};
use crate::linalg::{NovMatrix, ValuedBasis};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

use super::{FloerTypeComplex, Grading, ReducedComplex, ValuedComplex};

/// A finite sequence of complexes `C_1 → C_2 → … → C_n` joined by
/// norm non-increasing, filtration-preserving chain maps.
#[derive(Clone, Debug)]
pub struct OneRay {
    pub stages: Vec<FloerTypeComplex>,
    /// `maps[i] : stages[i] → stages[i+1]`.
    pub maps: Vec<NovMatrix>,
}

#[derive(Clone, Debug)]
pub struct TelescopeComplex {
    pub complex: FloerTypeComplex,
    /// For each generator: (stage, generator index within the stage, is a q-copy).
    pub origin: Vec<(usize, usize, bool)>,
}

/// Builds `⨁ C_i ⊕ ⨁_{i<n} q·C_i` with `δa = da` and
/// `δ(qa) = q·da + (−1)^{|a|}(κ_i a − a)`, `q` of degree −1. Generator norms
/// of `qa` equal those of `a`.
fn telescope_parts(stages: &[&ValuedComplex], maps: &[NovMatrix]) -> Result<(ValuedBasis, NovMatrix, Vec<(usize, usize, bool)>, Rat)> {
    let n = stages.len();
    if n == 0 {
        return Err(Error::Invalid("a ray needs at least one stage".into()));
    }
    if maps.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!("{n} stages need {} maps, got {}", n - 1, maps.len())));
    }
    let grading = stages[0].grading;
    if stages.iter().any(|s| s.grading != grading) {
        return Err(Error::Invalid("stages have different gradings".into()));
    }
    let precision = stages.iter().map(|s| s.precision.clone()).min().expect("nonempty");
    let cap = Valuation::Finite(precision.clone());
    for (i, k) in maps.iter().enumerate() {
        let (a, b) = (stages[i], stages[i + 1]);
        if k.rows() != b.len() || k.cols() != a.len() {
            return Err(Error::DimensionMismatch(format!("map {i} has the wrong shape")));
        }
        for (r, c, x) in k.nonzero_entries() {
            if a.basis.degrees[c] != b.basis.degrees[r] {
                return Err(Error::Invalid(format!("map {i} does not preserve degree")));
            }
            if x.val().lt_rat(&Rat::ZERO) {
                return Err(Error::Invalid(format!("map {i} does not preserve the filtration")));
            }
            if x.val().plus(&(&b.basis.weights[r] - &a.basis.weights[c])).lt_rat(&Rat::ZERO) {
                return Err(Error::Invalid(format!("map {i} increases norms")));
            }
        }
        if !b.d.mul(k).truncate(&cap).eq_mod(&k.mul(&a.d).truncate(&cap)) {
            return Err(Error::NotChainMap { stage: i });
        }
    }
    let mut origin = Vec::new();
    let mut offsets = Vec::new();
    for (s, c) in stages.iter().enumerate() {
        offsets.push(origin.len());
        origin.extend((0..c.len()).map(|g| (s, g, false)));
    }
    let mut q_offsets = Vec::new();
    for (s, c) in stages.iter().enumerate().take(n - 1) {
        q_offsets.push(origin.len());
        origin.extend((0..c.len()).map(|g| (s, g, true)));
    }
    let total = origin.len();
    let mut names = Vec::with_capacity(total);
    let mut degrees = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for &(s, g, q) in &origin {
        let b = &stages[s].basis;
        names.push(if q { format!("q.s{s}.{}", b.names[g]) } else { format!("s{s}.{}", b.names[g]) });
        degrees.push(if q { grading.source(b.degrees[g]) } else { b.degrees[g] });
        weights.push(b.weights[g].clone());
    }
    let mut d = NovMatrix::zeros(total, total, cap.clone());
    for (s, c) in stages.iter().enumerate() {
        for (i, j, x) in c.d.nonzero_entries() {
            d.set(offsets[s] + i, offsets[s] + j, x.clone());
            if s + 1 < n {
                d.set(q_offsets[s] + i, q_offsets[s] + j, x.clone());
            }
        }
    }
    for (s, k) in maps.iter().enumerate() {
        let a = stages[s];
        for j in 0..a.len() {
            let sign = if a.basis.degrees[j].rem_euclid(2) == 0 { Rat::ONE } else { -Rat::ONE };
            let col = q_offsets[s] + j;
            for r in 0..k.rows() {
                let x = k.get(r, j);
                if !x.is_zero() {
                    d.set(offsets[s + 1] + r, col, x.scale(&sign));
                }
            }
            let prev = d.get(offsets[s] + j, col).clone();
            d.set(offsets[s] + j, col, &prev - &NovikovElement::constant(sign));
        }
    }
    Ok((ValuedBasis::new(names, degrees, weights), d, origin, precision))
}

pub fn build_telescope(ray: &OneRay) -> Result<TelescopeComplex> {
    let stages: Vec<&ValuedComplex> = ray.stages.iter().map(|s| &s.complex).collect();
    let (basis, d, origin, precision) = telescope_parts(&stages, &ray.maps)?;
    let hbar = ray.stages.iter().map(|s| s.hbar.clone()).min().expect("nonempty");
    let outside = origin.iter().map(|&(s, g, _)| ray.stages[s].outside[g]).collect();
    let grading: Grading = stages[0].grading;
    let complex = ValuedComplex::new(basis, grading, d, precision)?;
    let complex = FloerTypeComplex::new(complex, hbar, outside)?;
    Ok(TelescopeComplex { complex, origin })
}

/// Telescope of reduced complexes joined by the reductions of the maps
/// (their ground-field parts).
pub fn reduced_telescope(stages: &[ReducedComplex], maps: &[NovMatrix]) -> Result<ReducedComplex> {
    let parts: Vec<&ValuedComplex> = stages.iter().map(|s| &s.complex).collect();
    let reduced_maps: Vec<NovMatrix> =
        maps.iter().map(|k| k.map(|x| NovikovElement::constant(x.coefficient(&Rat::ZERO)))).collect();
    let (basis, d, origin, precision) = telescope_parts(&parts, &reduced_maps)?;
    let hbar = stages.iter().map(|s| s.hbar.clone()).min().expect("nonempty");
    let outside = origin.iter().map(|&(s, g, _)| stages[s].outside[g]).collect();
    let complex = ValuedComplex::new(basis, stages[0].complex.grading, d, precision)?;
    Ok(ReducedComplex { complex, hbar, outside })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> FloerTypeComplex {
        let basis = ValuedBasis::new(vec!["x".into(), "y".into()], vec![0, 1], vec![Rat::ZERO, Rat::ZERO]);
        let mut d = NovMatrix::zeros(2, 2, Valuation::Finite(Rat::int(10)));
        d.set(1, 0, NovikovElement::t_pow(Rat::ONE));
        FloerTypeComplex::from_parts(basis, Grading::Z, d, Rat::ONE, Rat::int(10)).unwrap()
    }

    #[test]
    fn single_stage_ray_is_the_stage() {
        let ray = OneRay { stages: vec![pair()], maps: Vec::new() };
        let t = build_telescope(&ray).unwrap();
        assert_eq!(t.complex.len(), 2);
        assert!(t.complex.complex.d.eq_mod(&pair().complex.d));
        assert!(t.origin.iter().all(|&(s, _, q)| s == 0 && !q));
    }

    #[test]
    fn empty_ray_and_wrong_map_count_are_rejected() {
        assert!(build_telescope(&OneRay { stages: Vec::new(), maps: Vec::new() }).is_err());
        let ray = OneRay { stages: vec![pair(), pair()], maps: Vec::new() };
        assert!(matches!(build_telescope(&ray), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn maps_must_commute_with_d() {
        let mut k = NovMatrix::zeros(2, 2, Valuation::Finite(Rat::int(10)));
        k.set(0, 0, NovikovElement::one());
        let ray = OneRay { stages: vec![pair(), pair()], maps: vec![k] };
        assert!(matches!(build_telescope(&ray), Err(Error::NotChainMap { stage: 0 })));
    }

    #[test]
    fn q_copies_shift_degree_down() {
        let id = NovMatrix::identity(2, Valuation::Finite(Rat::int(10)));
        let t = build_telescope(&OneRay { stages: vec![pair(), pair()], maps: vec![id] }).unwrap();
        let b = t.complex.basis();
        let q = b.index_of("q.s0.x").unwrap();
        assert_eq!(b.degrees[q], -1);
        assert!(t.complex.complex.square_vanishes());
    }
}

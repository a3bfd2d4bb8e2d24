use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::smith_normal_form;
use crate::rational::Rat;

use super::ValuedComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// Generator valuations from the basis (the norm).
    Norm,
    /// All generators weight zero (the lattice valuation).
    ///
    /// In general this valuation is only semi-continuous for the norm
    /// filtration and its positive part need not be closed. At finite rank
    /// both issues disappear, and nothing here handles the general case.
    Relative,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DegreeBars {
    pub free_rank: usize,
    /// Positive torsion exponents, sorted ascending.
    pub torsion: Vec<Rat>,
}

/// Homology over `Λ_{≥0}` per degree: `Λ_{≥0}^{free} ⊕ ⨁ Λ_{≥0}/T^{λ}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TorsionBarcode {
    pub degrees: BTreeMap<i64, DegreeBars>,
}

impl TorsionBarcode {
    pub fn max_torsion(&self) -> Option<Rat> {
        self.degrees.values().flat_map(|b| b.torsion.iter()).max().cloned()
    }

    pub fn total_free_rank(&self) -> usize {
        self.degrees.values().map(|b| b.free_rank).sum()
    }

    pub fn free_rank(&self, k: i64) -> usize {
        self.degrees.get(&k).map_or(0, |b| b.free_rank)
    }
}

/// Per-degree Smith normal forms of the differential. Torsion in degree
/// `k+1` is the positive exponents of `d_k`; free rank is
/// `n_k − rank d_k − rank d_{k−1}`.
pub fn homology_barcode(c: &ValuedComplex, weighting: Weighting, slack: &Rat) -> Result<TorsionBarcode> {
    if let Some((i, j)) = c.degree_violation() {
        return Err(Error::NotAComplex(format!("entry {} <- {} does not raise degree by one", c.basis.names[i], c.basis.names[j])));
    }
    if !c.square_vanishes() {
        return Err(Error::NotAComplex("d^2 does not vanish modulo T^E".into()));
    }
    let weights = match weighting {
        Weighting::Norm => c.basis.weights.clone(),
        Weighting::Relative => vec![Rat::ZERO; c.len()],
    };
    let normalized = c.d.normalized(&weights, &weights);
    let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
    let mut bars: BTreeMap<i64, DegreeBars> = BTreeMap::new();
    for k in c.degrees() {
        bars.entry(k).or_default();
    }
    for k in c.degrees() {
        let src = c.basis.indices_in_degree(k);
        let tk = c.grading.target(k);
        let tgt = c.basis.indices_in_degree(tk);
        if src.is_empty() || tgt.is_empty() {
            ranks.insert(k, 0);
            continue;
        }
        let block = normalized.submatrix(&tgt, &src);
        let snf = smith_normal_form(&block, &c.precision, slack, false)?;
        ranks.insert(k, snf.rank());
        let entry = bars.entry(tk).or_default();
        entry.torsion.extend(snf.exponents.into_iter().filter(|e| e.is_positive()));
    }
    for k in c.degrees() {
        let n = c.basis.indices_in_degree(k).len();
        let out = ranks.get(&k).copied().unwrap_or(0);
        let incoming = ranks.get(&c.grading.source(k)).copied().unwrap_or(0);
        let b = bars.entry(k).or_default();
        b.free_rank = n - out - incoming;
        b.torsion.sort();
    }
    // Zero homology groups carry no information; dropping them lets
    // complexes with different generator degrees compare equal.
    bars.retain(|_, b| b.free_rank > 0 || !b.torsion.is_empty());
    Ok(TorsionBarcode { degrees: bars })
}

//! The locality spectral sequence of the filtration `F^p = T^{pħ}·L`, where
//! `L` is the lattice spanned by the basis (relative valuation `≥ 0`).
//!
//! Over `Λ_{≥0}` the lattice complex splits, by a filtration-preserving basis
//! change, into free classes and elementary pairs `x ↦ T^μ y`. A pair with
//! `μ = 0` dies entering `E₁`; a pair with `μ > 0` (then `μ ≥ ħ`) survives to
//! `E_i` and is killed by `d_i` where `i = ⌊μ/ħ⌋ + 1`, so `val(d_i) ∈
//! [(i−1)ħ, iħ)`. Pages are `T^ħ`-periodic in `p`; ranks are recorded per
//! cohomological degree as ranks over the graded pieces `Λ_{[pħ,(p+1)ħ)}`.
//!
//! Convergence here is weak convergence at a finite truncation: pages
//! stabilize. Whether the limit abuts to homology of an infinite-rank
//! completion is not decided; [`detect_hausdorff_failure`] is the only
//! diagnostic for it.

mod convergence;
mod hausdorff;

pub use convergence::{check_convergence_hypotheses, ConvergenceCase, ConvergenceReport, OrbitRecord};
pub use hausdorff::{detect_hausdorff_failure, ClassTrack, ClassVerdict, FamilyMember, HausdorffDiagnostic, HausdorffVerdict};

use std::collections::BTreeMap;

use crate::complexes::{FloerTypeComplex, ValuedComplex};
use crate::error::{Error, Result};
use crate::linalg::{default_slack, rank, smith_normal_form, NovMatrix};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

/// A class on a page: `free`, or one end of an elementary pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageClass {
    pub degree: i64,
    pub label: String,
}

/// `d_r` from class `source` to class `target` (indices into the page's
/// classes), with coefficient `T^{valuation}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageArrow {
    pub source: usize,
    pub target: usize,
    pub valuation: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub index: usize,
    pub classes: Vec<PageClass>,
    pub differential: Vec<PageArrow>,
}

impl Page {
    pub fn rank_in_degree(&self, k: i64) -> usize {
        self.classes.iter().filter(|c| c.degree == k).count()
    }

    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for c in &self.classes {
            *out.entry(c.degree).or_insert(0) += 1;
        }
        out
    }

    /// `d_r` as a matrix on the page classes.
    pub fn differential_matrix(&self) -> NovMatrix {
        let n = self.classes.len();
        let mut m = NovMatrix::zeros(n, n, Valuation::Infinite);
        for a in &self.differential {
            m.set(a.target, a.source, NovikovElement::t_pow(a.valuation.clone()));
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct SpectralSequenceState {
    pub source: FloerTypeComplex,
    pub r_max: usize,
    /// Pages `E_1 … E_{r_max}`.
    pub pages: Vec<Page>,
    pub first_nonzero_page: Option<usize>,
    /// `None` when a nonzero differential exists beyond `r_max`.
    pub tau: Option<Valuation>,
    /// Every differential of valuation below the precision has been found
    /// and none remains beyond `r_max`.
    pub collapse_certified: bool,
    /// `E₁` ranks equal the homology ranks of `(G, d₀)`.
    pub e1_matches_reduction: bool,
}

impl SpectralSequenceState {
    pub fn page(&self, r: usize) -> Option<&Page> {
        self.pages.get(r.checked_sub(1)?)
    }

    /// `E_{r+1}` is the homology of `(E_r, d_r)` for every computed page.
    pub fn pages_consistent(&self) -> bool {
        self.pages.windows(2).all(|w| {
            let (page, next) = (&w[0], &w[1]);
            let m = page.differential_matrix();
            let degrees: Vec<i64> = page.ranks().keys().copied().collect();
            let square_zero = m.mul(&m).is_zero();
            square_zero
                && degrees.iter().all(|&k| {
                    let here: Vec<usize> = (0..page.classes.len()).filter(|&i| page.classes[i].degree == k).collect();
                    let elsewhere: Vec<usize> = (0..page.classes.len()).filter(|&i| page.classes[i].degree != k).collect();
                    let outgoing = rank(&m.submatrix(&elsewhere, &here));
                    let incoming = rank(&m.submatrix(&here, &elsewhere));
                    next.rank_in_degree(k) == here.len() - outgoing - incoming
                })
        })
    }
}

struct Pair {
    source_degree: i64,
    target_degree: i64,
    mu: Rat,
}

fn page_of(mu: &Rat, hbar: &Rat) -> usize {
    let q = (mu / hbar).floor();
    usize::try_from(q).unwrap_or(0) + 1
}

/// Elementary pairs and free ranks of the lattice complex.
fn lattice_decomposition(c: &ValuedComplex) -> Result<(Vec<Pair>, BTreeMap<i64, usize>)> {
    let slack = default_slack();
    let mut pairs = Vec::new();
    let mut out_rank: BTreeMap<i64, usize> = BTreeMap::new();
    for k in c.degrees() {
        let (src, tgt, block) = c.block(k);
        if src.is_empty() || tgt.is_empty() {
            continue;
        }
        let snf = smith_normal_form(&block, &c.precision, &slack, false)?;
        out_rank.insert(k, snf.rank());
        for mu in snf.exponents {
            pairs.push(Pair { source_degree: k, target_degree: c.grading.target(k), mu });
        }
    }
    let mut free = BTreeMap::new();
    for k in c.degrees() {
        let n = c.basis.indices_in_degree(k).len();
        let out = out_rank.get(&k).copied().unwrap_or(0);
        let incoming = out_rank.get(&c.grading.source(k)).copied().unwrap_or(0);
        free.insert(k, n - out - incoming);
    }
    Ok((pairs, free))
}

/// Ranks of `H(G, d₀)` over the ground field, by degree.
fn reduction_ranks(c: &FloerTypeComplex) -> BTreeMap<i64, usize> {
    let g = &c.complex;
    let d0 = &c.d0;
    let block_rank = |k: i64| {
        let src = g.basis.indices_in_degree(k);
        let tgt = g.basis.indices_in_degree(g.grading.target(k));
        if src.is_empty() || tgt.is_empty() {
            0
        } else {
            rank(&d0.submatrix(&tgt, &src))
        }
    };
    g.degrees()
        .into_iter()
        .map(|k| {
            let n = g.basis.indices_in_degree(k).len();
            (k, n - block_rank(k) - block_rank(g.grading.source(k)))
        })
        .collect()
}

pub fn compute_pages(c: &FloerTypeComplex, r_max: usize) -> Result<SpectralSequenceState> {
    let horizon = &c.hbar * &Rat::int(r_max as i64);
    if &horizon >= c.precision() {
        return Err(Error::PrecisionExhausted { valuation: horizon, precision: c.precision().clone() });
    }
    let (pairs, free) = lattice_decomposition(&c.complex)?;
    let live: Vec<(usize, &Pair)> = pairs.iter().filter(|p| p.mu.is_positive()).map(|p| (page_of(&p.mu, &c.hbar), p)).collect();
    let mut pages = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let mut classes = Vec::new();
        for (&k, &n) in &free {
            for j in 0..n {
                classes.push(PageClass { degree: k, label: format!("free{k}.{j}") });
            }
        }
        let mut differential = Vec::new();
        for (idx, (page, p)) in live.iter().enumerate() {
            if *page < r {
                continue;
            }
            let source = classes.len();
            classes.push(PageClass { degree: p.source_degree, label: format!("pair{idx}.source") });
            classes.push(PageClass { degree: p.target_degree, label: format!("pair{idx}.target") });
            if *page == r {
                differential.push(PageArrow { source, target: source + 1, valuation: p.mu.clone() });
            }
        }
        pages.push(Page { index: r, classes, differential });
    }
    let first = live.iter().map(|(page, _)| *page).min();
    let (first_nonzero_page, tau, collapse_certified) = match first {
        None => (None, Some(Valuation::Infinite), true),
        Some(i) if i <= r_max => {
            let mu = live.iter().map(|(_, p)| p.mu.clone()).min().expect("nonempty");
            (Some(i), Some(Valuation::Finite(mu)), false)
        }
        Some(_) => (None, None, false),
    };
    let e1 = pages.first().map(Page::ranks).unwrap_or_default();
    let reduced = reduction_ranks(c);
    let e1_matches_reduction = reduced.iter().all(|(k, n)| e1.get(k).copied().unwrap_or(0) == *n)
        && e1.iter().all(|(k, n)| reduced.get(k).copied().unwrap_or(0) == *n);
    Ok(SpectralSequenceState {
        source: c.clone(),
        r_max,
        pages,
        first_nonzero_page,
        tau,
        collapse_certified,
        e1_matches_reduction,
    })
}

/// `val` of the first nonzero page differential, `+∞` under a collapse
/// certificate.
pub fn tau_from_ss(state: &SpectralSequenceState) -> Result<Valuation> {
    state.tau.clone().ok_or_else(|| {
        Error::Inconclusive(format!("no nonzero differential up to page {} and no collapse certificate", state.r_max))
    })
}

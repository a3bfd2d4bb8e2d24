//! Rectification of almost-commuting squares of isometries, in
//! orthonormal coordinates.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, NovMatrix};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

fn precision_of(m: &NovMatrix) -> Rat {
    match m.precision() {
        Valuation::Finite(e) => e.clone(),
        Valuation::Infinite => crate::linalg::default_precision(),
    }
}

/// `|f x| = |x|` for all `x`: entries in the valuation ring and every
/// invariant factor a unit.
pub fn is_isometry(f: &NovMatrix) -> Result<bool> {
    if f.min_val() < Valuation::Finite(Rat::ZERO) {
        return Ok(false);
    }
    let snf = smith_normal_form(f, &precision_of(f), &Rat::ZERO, false)?;
    Ok(snf.rank() == f.cols() && snf.exponents.iter().all(Rat::is_zero))
}

/// Inverse of a square matrix over the field by Gauss-Jordan elimination
/// with minimal-valuation pivots.
pub fn invert(a: &NovMatrix) -> Result<NovMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!("cannot invert a {n}x{} matrix", a.cols())));
    }
    let cap = a.precision().clone();
    let mut m = a.clone();
    let mut inv = NovMatrix::identity(n, cap.clone());
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&i| !m.get(i, k).is_zero())
            .min_by(|&i, &j| m.get(i, k).val().cmp(&m.get(j, k).val()))
            .ok_or_else(|| Error::Invalid("matrix is singular".into()))?;
        for mat in [&mut m, &mut inv] {
            for j in 0..n {
                let (x, y) = (mat.get(k, j).clone(), mat.get(pivot, j).clone());
                mat.set(k, j, y);
                mat.set(pivot, j, x);
            }
        }
        let p = m.get(k, k).inverse(&cap)?;
        for mat in [&mut m, &mut inv] {
            for j in 0..n {
                let x = (mat.get(k, j) * &p).truncate(&cap);
                mat.set(k, j, x);
            }
        }
        for i in 0..n {
            if i == k || m.get(i, k).is_zero() {
                continue;
            }
            let f = -m.get(i, k);
            for mat in [&mut m, &mut inv] {
                for j in 0..n {
                    let x = (mat.get(i, j) + &(&f * mat.get(k, j))).truncate(&cap);
                    mat.set(i, j, x);
                }
            }
        }
    }
    Ok(inv)
}

/// `g̃` with `g̃ h₀ = h₁ f` for the square
///
/// ```text
///   A₀ --h₀--> A₁
///   |f         |g
///   B₀ --h₁--> B₁
/// ```
#[derive(Clone, Debug)]
pub struct Rectified {
    pub map: NovMatrix,
    /// `val(g̃ − g)`.
    pub distance: Valuation,
    /// `|g̃ − g| < |g|`.
    pub smaller: bool,
    /// `g̃ h₀ = h₁ f` mod `T^E`.
    pub commutes: bool,
}

pub fn rectify_map(f: &NovMatrix, g: &NovMatrix, h0: &NovMatrix, h1: &NovMatrix) -> Result<Rectified> {
    let order: Vec<usize> = (0..h0.cols()).collect();
    rectify_map_in_order(f, g, h0, h1, &order)
}

/// As [`rectify_map`], reading the spanning image of `h₀` in the given
/// column order.
pub fn rectify_map_in_order(f: &NovMatrix, g: &NovMatrix, h0: &NovMatrix, h1: &NovMatrix, order: &[usize]) -> Result<Rectified> {
    if h0.cols() != f.cols() || g.cols() != h0.rows() || h1.cols() != f.rows() || h1.rows() != g.rows() {
        return Err(Error::DimensionMismatch("square does not compose".into()));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..h0.cols()).collect::<Vec<_>>() {
        return Err(Error::Invalid("column order must be a permutation".into()));
    }
    for (name, m) in [("f", f), ("g", g)] {
        if !is_isometry(m)? {
            return Err(Error::Invalid(format!("{name} is not an isometry")));
        }
    }
    let rank = crate::linalg::rank(h0);
    if rank < h0.cols() {
        return Err(Error::MapNotInjective { rank, cols: h0.cols() });
    }
    if rank < h0.rows() {
        return Err(Error::ImageNotSpanning { rank, dim: h0.rows() });
    }
    let gh0 = g.mul(h0);
    let defect = gh0.sub(&h1.mul(f));
    if defect.min_val() <= gh0.min_val() {
        return Err(Error::NotAlmostCommutative);
    }
    let all: Vec<usize> = (0..h0.rows()).collect();
    let h0p = h0.submatrix(&all, order);
    let h1fp = h1.mul(f).submatrix(&(0..h1.rows()).collect::<Vec<_>>(), order);
    let map = h1fp.mul(&invert(&h0p)?);
    let distance = map.sub(g).min_val();
    let smaller = distance > g.min_val();
    let commutes = map.mul(h0).eq_mod(&h1.mul(f));
    Ok(Rectified { map, distance, smaller, commutes })
}

/// A generating arrow `i → j` of a finite poset, with its structure maps
/// in the source (`source`) and target (`target`) diagrams.
#[derive(Clone, Debug)]
pub struct DiagramArrow {
    pub from: usize,
    pub to: usize,
    pub source: NovMatrix,
    pub target: NovMatrix,
}

/// An almost-natural transformation `f_i: A_i → B_i` between two diagrams
/// over the same poset.
#[derive(Clone, Debug)]
pub struct AlmostNatural {
    pub arrows: Vec<DiagramArrow>,
    pub maps: Vec<NovMatrix>,
}

#[derive(Clone, Debug)]
pub struct RectifiedTransformation {
    pub initial: usize,
    pub maps: Vec<NovMatrix>,
    /// `val(f̃_i − f_i)`.
    pub distances: Vec<Valuation>,
    /// Every generating square commutes mod `T^E`.
    pub natural: bool,
    /// `|f̃_i − f_i| < |f_i|` for every non-initial object.
    pub small: bool,
}

/// `(h₀ᵢ, k₀ᵢ)` along a spanning tree from `root`.
fn composites(t: &AlmostNatural, root: usize) -> Option<Vec<(NovMatrix, NovMatrix)>> {
    let n = t.maps.len();
    let mut paths: Vec<Option<(NovMatrix, NovMatrix)>> = vec![None; n];
    let p = t.maps[root].precision().clone();
    paths[root] = Some((NovMatrix::identity(t.maps[root].cols(), p.clone()), NovMatrix::identity(t.maps[root].rows(), p)));
    let mut queue = VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        for a in t.arrows.iter().filter(|a| a.from == i) {
            if paths[a.to].is_none() {
                let (h, k) = paths[i].as_ref().expect("visited");
                paths[a.to] = Some((a.source.mul(h), a.target.mul(k)));
                queue.push_back(a.to);
            }
        }
    }
    paths.into_iter().collect()
}

pub fn rectify_natural_transformation(t: &AlmostNatural) -> Result<RectifiedTransformation> {
    let n = t.maps.len();
    if let Some(a) = t.arrows.iter().find(|a| a.from >= n || a.to >= n) {
        return Err(Error::Invalid(format!("arrow {} -> {} leaves the poset", a.from, a.to)));
    }
    for a in &t.arrows {
        let fh = t.maps[a.to].mul(&a.source);
        if fh.sub(&a.target.mul(&t.maps[a.from])).min_val() <= fh.min_val() {
            return Err(Error::NotAlmostCommutative);
        }
    }
    let (initial, paths) = (0..n)
        .filter(|&i| !t.arrows.iter().any(|a| a.to == i))
        .find_map(|i| composites(t, i).map(|p| (i, p)))
        .ok_or(Error::NoInitialObject)?;
    let f0 = &t.maps[initial];
    let mut maps = Vec::with_capacity(n);
    let mut distances = Vec::with_capacity(n);
    for (i, (h, k)) in paths.iter().enumerate() {
        if i == initial {
            maps.push(f0.clone());
            distances.push(Valuation::Infinite);
            continue;
        }
        let r = rectify_map(f0, &t.maps[i], h, k)?;
        distances.push(r.distance);
        maps.push(r.map);
    }
    let natural = t.arrows.iter().all(|a| maps[a.to].mul(&a.source).eq_mod(&a.target.mul(&maps[a.from])));
    let small = (0..n).filter(|&i| i != initial).all(|i| distances[i] > t.maps[i].min_val());
    Ok(RectifiedTransformation { initial, maps, distances, natural, small })
}

/// `T^e` as a matrix entry.
pub fn t_entry(e: Rat) -> NovikovElement {
    NovikovElement::t_pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e() -> Valuation {
        Valuation::Finite(Rat::int(10))
    }

    fn q(rows: &[Vec<i64>]) -> NovMatrix {
        let r: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().map(|&x| Rat::int(x)).collect()).collect();
        NovMatrix::from_rationals(&r, e())
    }

    fn perturb(m: &NovMatrix, i: usize, j: usize, v: Rat) -> NovMatrix {
        let mut out = m.clone();
        let x = m.get(i, j) + &t_entry(v);
        out.set(i, j, x);
        out
    }

    #[test]
    fn commuting_square_is_unchanged() {
        let f = q(&[vec![1, 1], vec![0, 1]]);
        let h = q(&[vec![1, 0], vec![1, 1]]);
        let g = h.mul(&f).mul(&invert(&h).unwrap());
        let r = rectify_map(&f, &g, &h, &h).unwrap();
        assert!(r.map.eq_mod(&g));
        assert!(r.commutes);
    }

    #[test]
    fn perturbed_square_recovers_the_commuting_map() {
        let f = NovMatrix::identity(2, e());
        let h0 = q(&[vec![1, 1], vec![0, 1]]);
        let g = perturb(&NovMatrix::identity(2, e()), 0, 1, Rat::int(2));
        let r = rectify_map(&f, &g, &h0, &h0).unwrap();
        assert!(r.map.eq_mod(&NovMatrix::identity(2, e())));
        assert_eq!(r.distance, Valuation::Finite(Rat::int(2)));
        assert!(r.smaller && r.commutes);
        let again = rectify_map_in_order(&f, &g, &h0, &h0, &[1, 0]).unwrap();
        assert!(again.map.eq_mod(&r.map));
    }

    #[test]
    fn deficient_image_is_rejected() {
        let f = NovMatrix::identity(1, e());
        let g = NovMatrix::identity(2, e());
        let h0 = q(&[vec![1], vec![0]]);
        let h1 = q(&[vec![1], vec![0]]);
        assert!(matches!(rectify_map(&f, &g, &h0, &h1), Err(Error::ImageNotSpanning { rank: 1, dim: 2 })));
    }

    #[test]
    fn non_commuting_square_is_rejected() {
        let f = NovMatrix::identity(2, e());
        let g = q(&[vec![0, 1], vec![1, 0]]);
        let h = NovMatrix::identity(2, e());
        assert!(matches!(rectify_map(&f, &g, &h, &h), Err(Error::NotAlmostCommutative)));
    }

    #[test]
    fn single_object_is_identity() {
        let t = AlmostNatural { arrows: Vec::new(), maps: vec![q(&[vec![0, 1], vec![1, 0]])] };
        let r = rectify_natural_transformation(&t).unwrap();
        assert!(r.maps[0].eq_mod(&t.maps[0]) && r.natural);
    }

    #[test]
    fn cycle_has_no_initial_object() {
        let id = NovMatrix::identity(1, e());
        let arrow = |from, to| DiagramArrow { from, to, source: id.clone(), target: id.clone() };
        let t = AlmostNatural { arrows: vec![arrow(0, 1), arrow(1, 0)], maps: vec![id.clone(), id.clone()] };
        assert!(matches!(rectify_natural_transformation(&t), Err(Error::NoInitialObject)));
    }
}

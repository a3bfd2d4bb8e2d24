//! Smith normal form over the valuation ring `Λ_{≥0}`.

use crate::error::{Error, Result};
use crate::novikov::{Exponent, NovikovElement, Valuation};
use crate::rational::Rat;

use super::NovMatrix;

/// `left · input · right = diag(T^{λ_1}, …, T^{λ_r}, 0, …)` with
/// `λ_1 ≤ … ≤ λ_r` and `left`, `right` invertible over `Λ_{≥0}`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub exponents: Vec<Exponent>,
    pub left: Option<NovMatrix>,
    pub right: Option<NovMatrix>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }
}

/// Entries must have nonnegative valuation. Pivots are chosen by minimal
/// valuation with ties broken by lowest (row, column). A candidate pivot
/// with valuation in `[E − slack, E)` aborts with `PrecisionExhausted`;
/// entries vanishing modulo `T^E` count as zero.
pub fn smith_normal_form(a: &NovMatrix, precision: &Rat, slack: &Rat, track: bool) -> Result<SmithForm> {
    let cap = Valuation::Finite(precision.clone());
    let mut m = a.truncate(&cap);
    let (rows, cols) = (m.rows(), m.cols());
    if let Some((i, j, x)) = m.nonzero_entries().find(|(_, _, x)| x.val().lt_rat(&Rat::ZERO)) {
        return Err(Error::Invalid(format!("entry ({i},{j}) = {x:#} lies outside the valuation ring")));
    }
    let mut left = track.then(|| NovMatrix::identity(rows, cap.clone()));
    let mut right = track.then(|| NovMatrix::identity(cols, cap.clone()));
    let threshold = precision - slack;
    let mut exponents = Vec::new();
    for k in 0..rows.min(cols) {
        let mut best: Option<(Valuation, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                let v = m.get(i, j).val();
                if !v.is_infinite() && best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((Valuation::Finite(v), pi, pj)) = best else { break };
        if v >= threshold {
            return Err(Error::PrecisionExhausted { valuation: v, precision: precision.clone() });
        }
        swap_rows(&mut m, k, pi);
        swap_cols(&mut m, k, pj);
        if let Some(l) = left.as_mut() {
            swap_rows(l, k, pi);
        }
        if let Some(r) = right.as_mut() {
            swap_cols(r, k, pj);
        }
        // Scale row k by the unit T^v / pivot.
        let unit = m.get(k, k).inverse(&cap)?.shift(&v);
        scale_row(&mut m, k, &unit);
        if let Some(l) = left.as_mut() {
            scale_row(l, k, &unit);
        }
        m.set(k, k, NovikovElement::t_pow(v.clone()));
        let neg_v = -&v;
        for i in k + 1..rows {
            if m.get(i, k).is_zero() {
                continue;
            }
            let f = -m.get(i, k).shift(&neg_v);
            add_row_multiple(&mut m, i, k, &f, k + 1);
            m.set(i, k, NovikovElement::zero());
            if let Some(l) = left.as_mut() {
                add_row_multiple(l, i, k, &f, 0);
            }
        }
        for j in k + 1..cols {
            if m.get(k, j).is_zero() {
                continue;
            }
            let f = -m.get(k, j).shift(&neg_v);
            m.set(k, j, NovikovElement::zero());
            if let Some(r) = right.as_mut() {
                add_col_multiple(r, j, k, &f);
            }
        }
        exponents.push(v);
    }
    Ok(SmithForm { exponents, left, right })
}

fn swap_rows(m: &mut NovMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

fn swap_cols(m: &mut NovMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

fn scale_row(m: &mut NovMatrix, r: usize, c: &NovikovElement) {
    for j in 0..m.cols() {
        let x = m.get(r, j);
        if !x.is_zero() {
            let y = x * c;
            m.set(r, j, y);
        }
    }
}

/// row_dst += f · row_src, for columns from `start` on.
fn add_row_multiple(m: &mut NovMatrix, dst: usize, src: usize, f: &NovikovElement, start: usize) {
    for j in start..m.cols() {
        let s = m.get(src, j);
        if s.is_zero() {
            continue;
        }
        let y = m.get(dst, j) + &(f * s);
        m.set(dst, j, y);
    }
}

/// col_dst += f · col_src.
fn add_col_multiple(m: &mut NovMatrix, dst: usize, src: usize, f: &NovikovElement) {
    for i in 0..m.rows() {
        let s = m.get(i, src);
        if s.is_zero() {
            continue;
        }
        let y = m.get(i, dst) + &(f * s);
        m.set(i, dst, y);
    }
}

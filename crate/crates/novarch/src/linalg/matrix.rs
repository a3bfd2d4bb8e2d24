use std::fmt;

use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

use super::NovVector;

/// Dense storage, sparse arithmetic: zero entries are skipped in products.
/// Rows index the target basis and columns the source basis.
#[derive(Clone, Debug, PartialEq)]
pub struct NovMatrix {
    rows: usize,
    cols: usize,
    data: Vec<NovikovElement>,
    precision: Valuation,
}

impl NovMatrix {
    pub fn zeros(rows: usize, cols: usize, precision: Valuation) -> Self {
        NovMatrix { rows, cols, data: vec![NovikovElement::zero_mod(precision.clone()); rows * cols], precision }
    }

    pub fn identity(n: usize, precision: Valuation) -> Self {
        let mut m = NovMatrix::zeros(n, n, precision);
        for i in 0..n {
            m.set(i, i, NovikovElement::one());
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[NovVector], precision: Valuation) -> Self {
        let mut m = NovMatrix::zeros(rows, columns.len(), precision);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Matrix with ground-field entries.
    pub fn from_rationals(entries: &[Vec<Rat>], precision: Valuation) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let mut m = NovMatrix::zeros(rows, cols, precision);
        for (i, r) in entries.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                m.set(i, j, NovikovElement::constant(c.clone()));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn precision(&self) -> &Valuation {
        &self.precision
    }

    pub fn get(&self, i: usize, j: usize) -> &NovikovElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: NovikovElement) {
        self.data[i * self.cols + j] = x.truncate(&self.precision);
    }

    pub fn column(&self, j: usize) -> NovVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> NovVector {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &NovikovElement)> {
        self.data.iter().enumerate().map(move |(k, x)| (k / self.cols, k % self.cols, x))
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &NovikovElement)> {
        self.entries().filter(|(_, _, x)| !x.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn truncate(&self, precision: &Valuation) -> Self {
        let p = self.precision.clone().min(precision.clone());
        NovMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.truncate(&p)).collect(),
            precision: p,
        }
    }

    pub fn map(&self, f: impl Fn(&NovikovElement) -> NovikovElement) -> Self {
        NovMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| f(x).truncate(&self.precision)).collect(),
            precision: self.precision.clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = NovMatrix::zeros(self.cols, self.rows, self.precision.clone());
        for (i, j, x) in self.entries() {
            t.set(j, i, x.clone());
        }
        t
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = NovMatrix::zeros(rows.len(), cols.len(), self.precision.clone());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &NovMatrix) -> NovMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let p = self.precision.clone().min(other.precision.clone());
        let mut acc: Vec<NovikovElement> = vec![NovikovElement::zero_mod(p.clone()); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let slot = &mut acc[i * other.cols + j];
                    *slot = (&*slot + &(a * b)).truncate(&p);
                }
            }
        }
        NovMatrix { rows: self.rows, cols: other.cols, data: acc, precision: p }
    }

    pub fn apply(&self, v: &[NovikovElement]) -> NovVector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = NovikovElement::zero_mod(self.precision.clone());
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        s = &s + &(a * x);
                    }
                }
                s.truncate(&self.precision)
            })
            .collect()
    }

    fn zip(&self, other: &NovMatrix, f: impl Fn(&NovikovElement, &NovikovElement) -> NovikovElement) -> NovMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape mismatch");
        let p = self.precision.clone().min(other.precision.clone());
        NovMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b).truncate(&p)).collect(),
            precision: p,
        }
    }

    pub fn add(&self, other: &NovMatrix) -> NovMatrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &NovMatrix) -> NovMatrix {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> NovMatrix {
        self.map(|x| -x)
    }

    pub fn scale(&self, c: &NovikovElement) -> NovMatrix {
        self.map(|x| x * c)
    }

    /// `T^{w_i − w_j} a_ij` for target weights `w_i` and source weights `w_j`:
    /// the matrix of the same map in the unit-norm rescaled bases.
    pub fn normalized(&self, source: &[Rat], target: &[Rat]) -> NovMatrix {
        assert_eq!(self.cols, source.len());
        assert_eq!(self.rows, target.len());
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                let shift = &target[i] - &source[j];
                m.data[i * self.cols + j] = x.shift(&shift);
            }
        }
        m.precision = Valuation::Infinite;
        m
    }

    /// Minimal valuation of an entry: the valuation of the map relative to
    /// the lattices spanned by the two bases.
    pub fn min_val(&self) -> Valuation {
        self.data.iter().map(|x| x.val()).min().unwrap_or(Valuation::Infinite)
    }

    /// Equality of every entry modulo the precision.
    pub fn eq_mod(&self, other: &NovMatrix) -> bool {
        self.sub(other).is_zero()
    }

    pub fn rescale_exponents(&self, t: &Rat) -> NovMatrix {
        NovMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.rescale_exponents(t)).collect(),
            precision: match &self.precision {
                Valuation::Finite(p) => Valuation::Finite(p * t),
                Valuation::Infinite => Valuation::Infinite,
            },
        }
    }
}

impl fmt::Display for NovMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| {
                let x = self.get(i, j);
                format!("{x:#}")
            }).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

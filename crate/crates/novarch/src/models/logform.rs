//! Log one-forms `α = Σ α_{a,i} z^a dlog z_i` on a polyannulus and the
//! primitive `h` with `dh = α` away from the `a = 0` residues.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::novikov::NovikovElement;
use crate::rational::Rat;

/// Coefficient vectors `a ↦ (α_{a,1}, …, α_{a,n})`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LogForm {
    pub n: usize,
    pub components: BTreeMap<Vec<i64>, Vec<NovikovElement>>,
}

impl LogForm {
    pub fn new(n: usize) -> Self {
        LogForm { n, components: BTreeMap::new() }
    }

    /// Adds `c · z^a dlog z_i`.
    pub fn add_term(&mut self, a: Vec<i64>, i: usize, c: NovikovElement) {
        let n = self.n;
        let slot = self.components.entry(a).or_insert_with(|| vec![NovikovElement::zero(); n]);
        slot[i] = &slot[i] + &c;
    }

    /// `d(Σ h_a z^a) = Σ_a Σ_i a_i h_a z^a dlog z_i`.
    pub fn exterior_derivative(n: usize, h: &BTreeMap<Vec<i64>, NovikovElement>) -> Self {
        let mut out = LogForm::new(n);
        for (a, c) in h {
            for (i, &k) in a.iter().enumerate() {
                if k != 0 {
                    out.add_term(a.clone(), i, c.scale(&Rat::int(k)));
                }
            }
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.components.retain(|_, v| v.iter().any(|c| !c.is_zero()));
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, v) in &other.components {
            for (i, c) in v.iter().enumerate() {
                out.add_term(a.clone(), i, -c);
            }
        }
        out.prune();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|v| v.iter().all(NovikovElement::is_zero))
    }

    /// First monomial and index pair violating `a_i α_{a,j} = a_j α_{a,i}`.
    pub fn closedness_violation(&self) -> Option<(Vec<i64>, usize, usize)> {
        for (a, v) in &self.components {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    let lhs = v[j].scale(&Rat::int(a[i]));
                    let rhs = v[i].scale(&Rat::int(a[j]));
                    if !(&lhs - &rhs).is_zero() {
                        return Some((a.clone(), i, j));
                    }
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogformSolution {
    /// `h = Σ h_a z^a` over `a ≠ 0`.
    pub h: BTreeMap<Vec<i64>, NovikovElement>,
    /// The `a = 0` coefficients, `Σ_i ρ_i dlog z_i`, which no function
    /// can produce.
    pub obstruction: Vec<NovikovElement>,
}

impl LogformSolution {
    pub fn is_exact(&self) -> bool {
        self.obstruction.iter().all(NovikovElement::is_zero)
    }

    /// `α − ρ` as a form.
    pub fn obstruction_form(&self, n: usize) -> LogForm {
        let mut f = LogForm::new(n);
        for (i, c) in self.obstruction.iter().enumerate() {
            if !c.is_zero() {
                f.add_term(vec![0; n], i, c.clone());
            }
        }
        f
    }
}

pub fn solve_exact_logform(alpha: &LogForm) -> Result<LogformSolution> {
    let n = alpha.n;
    if let Some(v) = alpha.components.iter().find(|(a, v)| a.len() != n || v.len() != n) {
        return Err(Error::DimensionMismatch(format!("component {:?} does not have {n} entries", v.0)));
    }
    if let Some((a, i, j)) = alpha.closedness_violation() {
        return Err(Error::NotClosed { monomial: format!("{a:?}"), i, j });
    }
    let mut h = BTreeMap::new();
    let mut obstruction = vec![NovikovElement::zero(); n];
    for (a, v) in &alpha.components {
        match a.iter().position(|&k| k != 0) {
            Some(i) => {
                let c = v[i].scale(&Rat::new(1, a[i]));
                if !c.is_zero() {
                    h.insert(a.clone(), c);
                }
            }
            None => obstruction.clone_from(v),
        }
    }
    Ok(LogformSolution { h, obstruction })
}

//! Combinatorial checks of the convergence hypotheses on user-supplied
//! Reeb orbit tables. No geometry is computed here.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rational::Rat;

/// A Reeb orbit with its Conley–Zehnder index and action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub index: i64,
    pub action: Rat,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConvergenceCase {
    /// `c₁^rel = κ[ω, θ]` with `κ ≠ 0`, indices in `[lo, hi]`.
    Proportional { kappa: Rat, lo: i64, hi: i64 },
    /// `c₁^rel = 0`; actions bounded by a function of the index, given as
    /// a table `index ↦ bound`.
    IndexBounded { action_bound: BTreeMap<i64, Rat> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub holds: bool,
    /// Orbits violating the hypothesis.
    pub violations: Vec<OrbitRecord>,
    /// In the proportional case, the uniform bound `(1 + hi − lo)/|κ|` on
    /// the valuation of a differential contribution.
    pub valuation_bound: Option<Rat>,
}

pub fn check_convergence_hypotheses(orbits: &[OrbitRecord], case: &ConvergenceCase) -> Result<ConvergenceReport> {
    match case {
        ConvergenceCase::Proportional { kappa, lo, hi } => {
            if kappa.is_zero() {
                return Err(Error::Invalid("the proportional case needs κ ≠ 0".into()));
            }
            if lo > hi {
                return Err(Error::Invalid(format!("empty index window [{lo}, {hi}]")));
            }
            let violations: Vec<OrbitRecord> = orbits.iter().filter(|o| o.index < *lo || o.index > *hi).cloned().collect();
            let bound = &Rat::int(1 + hi - lo) / &kappa.abs();
            Ok(ConvergenceReport { holds: violations.is_empty(), violations, valuation_bound: Some(bound) })
        }
        ConvergenceCase::IndexBounded { action_bound } => {
            let violations: Vec<OrbitRecord> = orbits
                .iter()
                .filter(|o| action_bound.get(&o.index).is_none_or(|b| &o.action > b))
                .cloned()
                .collect();
            Ok(ConvergenceReport { holds: violations.is_empty(), violations, valuation_bound: None })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit(index: i64, action: i64) -> OrbitRecord {
        OrbitRecord { index, action: Rat::int(action) }
    }

    #[test]
    fn proportional_window() {
        let case = ConvergenceCase::Proportional { kappa: Rat::new(1, 2), lo: -1, hi: 2 };
        let ok = check_convergence_hypotheses(&[orbit(0, 5), orbit(2, 9)], &case).unwrap();
        assert!(ok.holds);
        assert_eq!(ok.valuation_bound, Some(Rat::int(8)));
        let bad = check_convergence_hypotheses(&[orbit(3, 1)], &case).unwrap();
        assert_eq!(bad.violations, vec![orbit(3, 1)]);
    }

    #[test]
    fn index_bounded_table() {
        let case = ConvergenceCase::IndexBounded { action_bound: BTreeMap::from([(1, Rat::int(3))]) };
        assert!(check_convergence_hypotheses(&[orbit(1, 3)], &case).unwrap().holds);
        assert!(!check_convergence_hypotheses(&[orbit(1, 4)], &case).unwrap().holds);
        assert!(!check_convergence_hypotheses(&[orbit(2, 0)], &case).unwrap().holds);
    }
}

//! Worked models: the truncated CP¹ family, polyvector fields on a
//! polyannulus with their BV structure, log-form rectification, and
//! reproducible random complexes.

mod bv;
mod cp1;
mod logform;
mod random;

pub use bv::{polyannulus_bv, upsilon, upsilon_eval, BvChecks, JacobiSweep, PolyMonomial, Polyvector, PolyvectorBV, UpsilonReport};
pub use cp1::{cp1_hbar, cp1_model, Cp1Model};
pub use random::{random_deformable_complex, random_floer_complex};
pub use logform::{solve_exact_logform, LogForm, LogformSolution};

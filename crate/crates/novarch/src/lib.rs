//! Exact computations with filtered complexes over the universal Novikov
//! field: boundary depth, homological perturbation, the locality spectral
//! sequence, polyhedral flux data, and rigidity of perturbed products.

pub mod error;
pub mod novikov;
pub mod rational;

pub use error::{Error, Result};
pub use novikov::{Exponent, NovikovElement, NovikovInterval, Valuation};
pub use rational::Rat;
pub mod linalg;
pub mod complexes;
pub mod hpt;
pub mod models;
pub mod spectral;
pub mod tauflux;
pub mod rigidity;

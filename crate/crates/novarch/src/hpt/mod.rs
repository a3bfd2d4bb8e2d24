//! Boundary depth, special deformation retractions onto homology, and the
//! homological perturbation lemma with its norm bookkeeping.

mod depth;
mod perturb;
mod sdr;

pub use depth::{boundary_depth, boundary_depth_def, boundary_depth_torsion, DepthReport};
pub use perturb::{check_perturbed, default_epsilon, homology_class_val, perturb, PerturbedCheck, PerturbedRetraction};
pub use sdr::{check_sdr, special_dr, RetractionCheck, SpecialRetraction};

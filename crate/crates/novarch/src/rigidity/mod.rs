//! Rigidity of perturbed products on truncated affinoid algebras, and
//! rectification of almost-commuting diagrams.

pub mod iso;
pub mod model;
pub mod rectify;
pub mod star;

pub use iso::{
    rigidity_iso_annulus, rigidity_iso_laurent, rigidity_iso_polyannulus, rigidity_iso_tate, AnnulusSolution, IsoReport,
    LaurentDomain, RigidityIso, SolverTrace,
};
pub use model::{AffElement, AffinoidModel, AnnulusFactor, Monomial};
pub use rectify::{
    invert, is_isometry, rectify_map, rectify_map_in_order, rectify_natural_transformation, AlmostNatural, DiagramArrow,
    Rectified, RectifiedTransformation,
};
pub use star::{defect, twist_by, ProductPerturbation, ReferenceStar, StarProduct, TableStar, TwistStar};

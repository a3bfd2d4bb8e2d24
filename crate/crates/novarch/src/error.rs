use crate::novikov::Valuation;
use crate::rational::Rat;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("inversion of a zero Novikov element")]
    ZeroInversion,
    #[error("precision exhausted: pivot valuation {valuation} is within the slack of the working precision {precision}")]
    PrecisionExhausted { valuation: Rat, precision: Rat },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("continuation map {stage} is not a chain map")]
    NotChainMap { stage: usize },
    #[error("flagged generators do not span a subcomplex: {from} maps to unflagged {to}")]
    NotSubcomplex { from: String, to: String },
    #[error("flagged subcomplex is not acyclic: {0}")]
    NotAcyclic(String),
    #[error("perturbation too large: val(delta) = {delta} does not exceed boundary depth {beta}")]
    PerturbationTooLarge { delta: Valuation, beta: Rat },
    #[error("perturbation series did not terminate after {terms} terms")]
    SeriesDiverged { terms: usize },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("class {index} lies outside the cone C(P)")]
    ClassOutsideCone { index: usize },
    #[error("point lies outside the polytope")]
    PointOutsidePolytope,
    #[error("dimension {0} exceeds the supported maximum of 8")]
    DimensionTooLarge(usize),
    #[error("map is not injective (rank {rank} < {cols})")]
    MapNotInjective { rank: usize, cols: usize },
    #[error("product perturbation is not close enough: {0}")]
    NotClose(String),
    #[error("fixed-point iteration stalled after {steps} steps")]
    IterationStalled { steps: usize },
    #[error("square is not almost commutative")]
    NotAlmostCommutative,
    #[error("image does not span the target (rank {rank} < {dim})")]
    ImageNotSpanning { rank: usize, dim: usize },
    #[error("poset has no initial object")]
    NoInitialObject,
    #[error("form is not closed: component ({monomial}) {i},{j}")]
    NotClosed { monomial: String, i: usize, j: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

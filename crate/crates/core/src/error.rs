use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate frame: reference points coincide")]
    DegenerateFrame,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("marking kinds differ")]
    MarkingKindMismatch,
    #[error("invalid 2-torsion data: {0}")]
    InvalidTorsion(String),
    #[error("coincident branch points")]
    CoincidentBranchPoints,
    #[error("AGM did not converge after {0} iterations")]
    AgmNonConvergence(usize),
    #[error("point not in the upper half-plane: {0}")]
    NotInUpperHalfPlane(String),
    #[error("ill-conditioned lattice system (condition number {0:e})")]
    IllConditioned(f64),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("lattice image is not primitive: {0}")]
    NonPrimitive(String),
    #[error("not an isogeny: {0}")]
    NotAnIsogeny(String),
    #[error("invalid period matrix: {0}")]
    InvalidPeriodMatrix(String),
    #[error("invalid polarization type: {0}")]
    InvalidPolarizationType(String),
    #[error("not in Prym locus: {0}")]
    NotInPrymLocus(String),
    #[error("degenerate boundary point: {0}")]
    DegenerateBoundary(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("integer overflow in exact lattice arithmetic")]
    IntegerOverflow,
}

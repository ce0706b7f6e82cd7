use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed groupoid definition: {0}")]
    MalformedSpec(String),
    #[error("groupoid axiom violated: {0}")]
    AxiomViolation(String),
    #[error("not a group action: {0}")]
    NotAnAction(String),
    #[error("`{0}` is not a unit")]
    NotAUnit(String),
    #[error("nonpositive Haar weight at `{0}`")]
    NonpositiveWeight(String),
    #[error("Haar system is not left invariant: {0}")]
    NotInvariant(String),
    #[error("exact arithmetic requested but the Haar system has floating-point weights")]
    InexactHaar,
    #[error("operands live over different groupoids or Haar systems")]
    BaseMismatch,
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("induced action does not descend to the quotient (residual {0:e})")]
    QuotientInconsistency(f64),
    #[error("subgroupoid is not a stability group")]
    NotIsotropyCase,
    #[error("subgroupoid chain violated: {0}")]
    ChainViolation(String),
    #[error("groupoid is not a group ({0} units)")]
    NotAGroup(usize),
    #[error("decomposition failed after {0} attempts")]
    DecompositionFailure(usize),
    #[error("input representation is not irreducible (commutant dimension {0})")]
    NotIrreducibleInput(usize),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use num_bigint::BigInt;
use thiserror::Error;

/// Errors from the exact matrix kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("rows do not span a full-rank sublattice")]
    NotFullRank,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

/// Errors from lattice-level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("gram matrix is not a valid even positive definite lattice: {0}")]
    InvalidLattice(String),
    #[error("isometry test only supported up to rank 8 (got {0})")]
    RankTooLarge(usize),
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("construction self-check failed: {0}")]
    ConstructionSelfCheckFailed(String),
    #[error("binary form is not positive definite")]
    NotPositiveDefinite,
}

/// Errors from automorphism validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomorphismError {
    #[error("matrix does not preserve the gram matrix")]
    NotIsometry,
    #[error("matrix does not have order {0}")]
    WrongOrder(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("matrix shape does not match the lattice rank")]
    ShapeMismatch,
}

/// Errors from theta-coefficient computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("form is not positive semi-definite")]
    NotPsd,
    #[error("form 2T must be symmetric with even diagonal")]
    NotSemiIntegral,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0}")]
    BeyondDeskScale(String),
}

/// The preimage of a group-ring element under the cyclotomic embedding
/// does not exist.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("(a, beta) is not in the image of the group ring: a - sum(beta) = {residue} is not divisible by p")]
pub struct NotInImage {
    pub residue: BigInt,
}

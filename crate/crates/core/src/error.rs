//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("cannot factor zero")]
    FactorZero,

    #[error("division by zero")]
    DivisionByZero,

    #[error("not a unit: {0}")]
    NotAUnit(String),

    #[error("modulus not irreducible: {0}")]
    ModulusNotIrreducible(String),

    #[error("not a prime: {0}")]
    NotPrime(u64),

    #[error("prime field order {0} exceeds the supported bound 2^32")]
    PrimeTooLarge(u64),

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("jacobian not a unit: {0}")]
    JacobianNotUnit(String),

    #[error("non-modular case required: group order vanishes in the base field")]
    NonModular,

    #[error("singular eigenvalue system: root of unity not of exact declared order")]
    SingularEigenSystem,

    #[error("not diagonalizable over the base field: {0}")]
    NotDiagonalizable(String),

    #[error("conjugation into bounded subgroup failed: {0}")]
    PeakReductionStalled(String),

    #[error("kernel not principal within degree bound {0}")]
    KernelBound(usize),

    #[error("not homogeneous for the grading: {0}")]
    NotHomogeneous(String),

    #[error("invalid group data: {0}")]
    InvalidGroup(String),

    #[error("invalid character data: {0}")]
    InvalidCharacter(String),

    #[error("no coordinate mate within the degree bound for: {0}")]
    NoMate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
